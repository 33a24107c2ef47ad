#ifndef SYNTAXPROBE_CORPUS_HPP
#define SYNTAXPROBE_CORPUS_HPP

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

namespace syntaxprobe {

struct CorpusEntry {
  std::string id;
  std::string transcript;
  std::size_t word_count = 0;
};

// Ordered utterance list. IDs are unique; word_count always equals the
// whitespace-token count of the transcript.
class CorpusManifest {
 public:
  CorpusManifest() = default;
  explicit CorpusManifest(std::vector<CorpusEntry> entries);

  // Appends an utterance, computing its word count. Throws
  // DuplicateUtteranceID.
  void add(std::string id, std::string transcript);

  const std::vector<CorpusEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<std::string> ids() const;

 private:
  std::vector<CorpusEntry> entries_;
  std::unordered_set<std::string> id_set_;
};

// `id<TAB>transcript` per line.
CorpusManifest read_corpus_tsv(const std::string& path);
void write_corpus_tsv(const std::string& path, const CorpusManifest& corpus);

/// Lowercases (full Unicode case mapping) and splits on Unicode whitespace.
/// Punctuation stays attached to its token.
std::vector<std::string> tokenize(std::string_view text);
std::size_t word_count(std::string_view text);

struct FilterResult {
  CorpusManifest manifest;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

// Keeps utterances with at most max_words words, preserving order.
FilterResult filter_corpus(const CorpusManifest& corpus,
                           std::size_t max_words);

// True if some alphabetic code point belongs to a script other than Latin
// (Common and Inherited never count).
bool has_non_latin_letter(std::string_view text);
FilterResult remove_non_latin(const CorpusManifest& corpus);

// Dense token -> column map, indices 0..size-1 assigned in lexicographic
// token order so the vocabulary does not depend on corpus order.
class BowVocabulary {
 public:
  BowVocabulary() = default;
  explicit BowVocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  // -1 when absent.
  long index_of(const std::string& token) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t> index_;
};

// Tokens occurring at least min_count times across the given corpora.
BowVocabulary build_vocabulary(const std::vector<const CorpusManifest*>& corpora,
                               std::size_t min_count = 1);
BowVocabulary read_vocabulary(const std::string& path);
void write_vocabulary(const std::string& path, const BowVocabulary& vocab);

/// Row i holds the count of each vocabulary token in transcript i
/// (0/1 presence when binary). Out-of-vocabulary tokens are ignored.
Eigen::MatrixXd bow_features(const CorpusManifest& corpus,
                             const BowVocabulary& vocab, bool binary = false);

Eigen::MatrixXd word_count_feature(const CorpusManifest& corpus);

}  // namespace syntaxprobe

#endif
