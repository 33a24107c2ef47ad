#ifndef SYNTAXPROBE_EMBEDDING_HPP
#define SYNTAXPROBE_EMBEDDING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace syntaxprobe {

// One model layer's utterance vectors. Row r belongs to ids()[r]; values
// are stored as float32 exactly as on disk.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Throws RowMismatch, DuplicateUtteranceID or NonFiniteValue.
  EmbeddingTable(std::uint32_t layer_id, std::uint32_t dim,
                 std::vector<float> data, std::vector<std::string> ids);
  // Convenience constructor rounding a double matrix to float32.
  EmbeddingTable(std::uint32_t layer_id, const Eigen::MatrixXd& data,
                 std::vector<std::string> ids);

  std::uint32_t layer_id() const noexcept { return layer_id_; }
  std::uint32_t rows() const noexcept {
    return static_cast<std::uint32_t>(ids_.size());
  }
  std::uint32_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<float>& data() const noexcept { return data_; }

  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }
  std::optional<std::size_t> find(const std::string& id) const;
  // Throws UnknownUtteranceID.
  std::size_t row_of(const std::string& id) const;

  // Rows selected by utterance ID, widened to double.
  Eigen::MatrixXd gather(std::span<const std::string> ids) const;
  Eigen::MatrixXd to_matrix() const;

 private:
  std::uint32_t layer_id_ = 0;
  std::uint32_t dim_ = 0;
  std::vector<float> data_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Binary layout: "WEMB", version 0x01, then layer_id, rows, dim as u32
// little-endian, then rows*dim float32 little-endian, row-major.
struct WembHeader {
  std::uint32_t layer_id = 0;
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
};

void write_wemb(const std::string& path, const WembHeader& header,
                std::span<const float> data);
// Returns header and payload; validates magic, version and payload length.
std::pair<WembHeader, std::vector<float>> read_wemb(const std::string& path);

// JSON-lines manifest, one `{"row": <int>, "id": "<utterance-id>"}` per row.
void write_manifest_jsonl(const std::string& path,
                          const std::vector<std::string>& ids);
std::vector<std::string> read_manifest_jsonl(const std::string& path);

// The manifest that accompanies `layer_3.wemb` is `layer_3.jsonl` when
// present, otherwise `manifest.jsonl` in the same directory.
std::string manifest_path_for(const std::string& wemb_path);

EmbeddingTable load_embedding_table(const std::string& wemb_path);
EmbeddingTable load_embedding_table(const std::string& wemb_path,
                                    const std::string& manifest_path);
// Writes `<stem>.wemb` and `<stem>.jsonl`.
void save_embedding_table(const std::string& wemb_path,
                          const EmbeddingTable& table);

// `layer_<k>.wemb` files in a directory, sorted by k.
std::vector<std::pair<std::uint32_t, std::string>> discover_layers(
    const std::string& dir);

}  // namespace syntaxprobe

#endif
