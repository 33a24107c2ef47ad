#include "syntaxprobe/embedding.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

namespace fs = std::filesystem;

namespace {

constexpr std::array<unsigned char, 4> kMagic = {0x57, 0x45, 0x4D, 0x42};
constexpr unsigned char kVersion = 0x01;
constexpr std::size_t kHeaderBytes = 4 + 1 + 3 * 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::uint32_t layer_id, std::uint32_t dim,
                               std::vector<float> data,
                               std::vector<std::string> ids)
    : layer_id_(layer_id), dim_(dim), data_(std::move(data)), ids_(std::move(ids)) {
  if (data_.size() != static_cast<std::size_t>(dim_) * ids_.size())
    throw Error(Errc::RowMismatch,
                "embedding payload has " + std::to_string(data_.size()) +
                    " values, expected " + std::to_string(ids_.size()) + "x" +
                    std::to_string(dim_));
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw Error(Errc::NonFiniteValue,
                  "row " + std::to_string(i / std::max<std::uint32_t>(dim_, 1)) +
                      " of layer " + std::to_string(layer_id_));
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r)
    if (!index_.emplace(ids_[r], r).second)
      throw Error(Errc::DuplicateUtteranceID, ids_[r]);
}

EmbeddingTable::EmbeddingTable(std::uint32_t layer_id,
                               const Eigen::MatrixXd& data,
                               std::vector<std::string> ids)
    : EmbeddingTable(layer_id, static_cast<std::uint32_t>(data.cols()),
                     [&data] {
                       std::vector<float> v(data.size());
                       std::size_t k = 0;
                       for (Eigen::Index r = 0; r < data.rows(); ++r)
                         for (Eigen::Index c = 0; c < data.cols(); ++c)
                           v[k++] = static_cast<float>(data(r, c));
                       return v;
                     }(),
                     std::move(ids)) {
  if (static_cast<std::size_t>(data.rows()) != ids_.size())
    throw Error(Errc::RowMismatch, "matrix rows differ from id count");
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingTable::row_of(const std::string& id) const {
  const auto r = find(id);
  if (!r)
    throw Error(Errc::UnknownUtteranceID,
                "'" + id + "' not in layer " + std::to_string(layer_id_));
  return *r;
}

Eigen::MatrixXd EmbeddingTable::gather(std::span<const std::string> ids) const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ids.size()), dim_);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = row(row_of(ids[i]));
    for (std::uint32_t c = 0; c < dim_; ++c)
      m(static_cast<Eigen::Index>(i), c) = src[c];
  }
  return m;
}

Eigen::MatrixXd EmbeddingTable::to_matrix() const { return gather(ids_); }

void write_wemb(const std::string& path, const WembHeader& header,
                std::span<const float> data) {
  if (data.size() != static_cast<std::size_t>(header.rows) * header.dim)
    throw Error(Errc::RowMismatch, "payload size disagrees with header");
  std::string bytes;
  bytes.reserve(kHeaderBytes + data.size() * 4);
  bytes.append(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
  bytes.push_back(static_cast<char>(kVersion));
  put_u32(bytes, header.layer_id);
  put_u32(bytes, header.rows);
  put_u32(bytes, header.dim);
  for (float f : data) put_u32(bytes, std::bit_cast<std::uint32_t>(f));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path);
}

std::pair<WembHeader, std::vector<float>> read_wemb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes)
    throw Error(Errc::BadFormat, path + ": truncated header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw Error(Errc::BadFormat, path + ": bad magic (expected WEMB)");
  if (bytes[4] != kVersion)
    throw Error(Errc::BadFormat,
                path + ": unsupported version " + std::to_string(bytes[4]));
  WembHeader h;
  h.layer_id = get_u32(&bytes[5]);
  h.rows = get_u32(&bytes[9]);
  h.dim = get_u32(&bytes[13]);
  const std::size_t n = static_cast<std::size_t>(h.rows) * h.dim;
  if (bytes.size() != kHeaderBytes + 4 * n)
    throw Error(Errc::BadFormat,
                path + ": payload is " + std::to_string(bytes.size() - kHeaderBytes) +
                    " bytes, header implies " + std::to_string(4 * n));
  std::vector<float> data(n);
  for (std::size_t i = 0; i < n; ++i)
    data[i] = std::bit_cast<float>(get_u32(&bytes[kHeaderBytes + 4 * i]));
  return {h, std::move(data)};
}

void write_manifest_jsonl(const std::string& path,
                          const std::vector<std::string>& ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  for (std::size_t r = 0; r < ids.size(); ++r)
    out << "{\"row\": " << r << ", \"id\": " << nlohmann::json(ids[r]).dump()
        << "}\n";
}

std::vector<std::string> read_manifest_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    try {
      const auto obj = nlohmann::json::parse(line);
      const auto row = obj.at("row").get<std::size_t>();
      if (row != ids.size())
        throw Error(Errc::BadFormat, where + "row " + std::to_string(row) +
                                         " out of order");
      ids.push_back(obj.at("id").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::BadFormat, where + e.what());
    }
  }
  return ids;
}

std::string manifest_path_for(const std::string& wemb_path) {
  fs::path own = fs::path(wemb_path).replace_extension(".jsonl");
  if (fs::exists(own)) return own.string();
  return (fs::path(wemb_path).parent_path() / "manifest.jsonl").string();
}

EmbeddingTable load_embedding_table(const std::string& wemb_path) {
  return load_embedding_table(wemb_path, manifest_path_for(wemb_path));
}

EmbeddingTable load_embedding_table(const std::string& wemb_path,
                                    const std::string& manifest_path) {
  auto [header, data] = read_wemb(wemb_path);
  std::vector<std::string> ids = read_manifest_jsonl(manifest_path);
  if (ids.size() != header.rows)
    throw Error(Errc::RowMismatch,
                manifest_path + " lists " + std::to_string(ids.size()) +
                    " rows, " + wemb_path + " has " + std::to_string(header.rows));
  return EmbeddingTable(header.layer_id, header.dim, std::move(data),
                        std::move(ids));
}

void save_embedding_table(const std::string& wemb_path,
                          const EmbeddingTable& table) {
  write_wemb(wemb_path, {table.layer_id(), table.rows(), table.dim()},
             table.data());
  write_manifest_jsonl(fs::path(wemb_path).replace_extension(".jsonl").string(),
                       table.ids());
}

std::vector<std::pair<std::uint32_t, std::string>> discover_layers(
    const std::string& dir) {
  if (!fs::is_directory(dir))
    throw Error(Errc::Io, "embedding directory " + dir + " does not exist");
  static const std::regex pattern(R"(layer_(\d+)\.wemb)");
  std::vector<std::pair<std::uint32_t, std::string>> layers;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern))
      layers.emplace_back(static_cast<std::uint32_t>(std::stoul(m[1])),
                          entry.path().string());
  }
  std::sort(layers.begin(), layers.end());
  for (std::size_t i = 1; i < layers.size(); ++i)
    if (layers[i].first == layers[i - 1].first)
      throw Error(Errc::BadFormat,
                  "layer " + std::to_string(layers[i].first) +
                      " appears twice in " + dir);
  return layers;
}

}  // namespace syntaxprobe
