#include "syntaxprobe/corpus.hpp"

#include <fstream>
#include <set>
#include <unordered_set>

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

namespace {

// Splits UTF-8 text on Unicode whitespace.
std::vector<std::string> split_unicode_space(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c >= 0 && u_isUWhiteSpace(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(start, i - start));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

FilterResult keep_if(const CorpusManifest& corpus, auto&& predicate) {
  FilterResult result;
  std::vector<CorpusEntry> kept;
  for (const CorpusEntry& e : corpus.entries()) {
    if (predicate(e))
      kept.push_back(e);
    else
      ++result.dropped;
  }
  result.kept = kept.size();
  result.manifest = CorpusManifest(std::move(kept));
  return result;
}

}  // namespace

CorpusManifest::CorpusManifest(std::vector<CorpusEntry> entries) {
  entries_.reserve(entries.size());
  for (CorpusEntry& e : entries) add(std::move(e.id), std::move(e.transcript));
}

void CorpusManifest::add(std::string id, std::string transcript) {
  if (!id_set_.insert(id).second)
    throw Error(Errc::DuplicateUtteranceID, id);
  CorpusEntry e;
  e.word_count = word_count(transcript);
  e.id = std::move(id);
  e.transcript = std::move(transcript);
  entries_.push_back(std::move(e));
}

std::vector<std::string> CorpusManifest::ids() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const CorpusEntry& e : entries_) out.push_back(e.id);
  return out;
}

CorpusManifest read_corpus_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open corpus " + path);
  std::vector<CorpusEntry> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    if (tab == std::string::npos || tab == 0)
      throw Error(Errc::BadFormat, where + "expected id<TAB>transcript");
    CorpusEntry e;
    e.id = line.substr(0, tab);
    e.transcript = line.substr(tab + 1);
    if (!seen.insert(e.id).second)
      throw Error(Errc::DuplicateUtteranceID, where + e.id);
    e.word_count = word_count(e.transcript);
    entries.push_back(std::move(e));
  }
  return CorpusManifest(std::move(entries));
}

void write_corpus_tsv(const std::string& path, const CorpusManifest& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write corpus " + path);
  for (const CorpusEntry& e : corpus.entries())
    out << e.id << '\t' << e.transcript << '\n';
}

std::vector<std::string> tokenize(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());
  std::string lowered;
  u.toUTF8String(lowered);
  return split_unicode_space(lowered);
}

std::size_t word_count(std::string_view text) {
  return split_unicode_space(text).size();
}

FilterResult filter_corpus(const CorpusManifest& corpus,
                           std::size_t max_words) {
  return keep_if(corpus, [max_words](const CorpusEntry& e) {
    return e.word_count <= max_words;
  });
}

bool has_non_latin_letter(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0 || !u_isalpha(c)) continue;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script = uscript_getScript(c, &status);
    if (U_FAILURE(status)) continue;
    if (script != USCRIPT_LATIN && script != USCRIPT_COMMON &&
        script != USCRIPT_INHERITED)
      return true;
  }
  return false;
}

FilterResult remove_non_latin(const CorpusManifest& corpus) {
  return keep_if(corpus, [](const CorpusEntry& e) {
    return !has_non_latin_letter(e.transcript);
  });
}

BowVocabulary::BowVocabulary(std::vector<std::string> tokens) {
  std::set<std::string> unique(tokens.begin(), tokens.end());
  tokens_.assign(unique.begin(), unique.end());
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = i;
}

long BowVocabulary::index_of(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

BowVocabulary build_vocabulary(const std::vector<const CorpusManifest*>& corpora,
                               std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const CorpusManifest* corpus : corpora)
    for (const CorpusEntry& e : corpus->entries())
      for (std::string& tok : tokenize(e.transcript)) ++counts[std::move(tok)];
  std::vector<std::string> tokens;
  for (const auto& [tok, n] : counts)
    if (n >= min_count) tokens.push_back(tok);
  return BowVocabulary(std::move(tokens));
}

BowVocabulary read_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open vocabulary " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return BowVocabulary(std::move(tokens));
}

void write_vocabulary(const std::string& path, const BowVocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write vocabulary " + path);
  for (const std::string& t : vocab.tokens()) out << t << '\n';
}

Eigen::MatrixXd bow_features(const CorpusManifest& corpus,
                             const BowVocabulary& vocab, bool binary) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(corpus.size()),
      static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const std::string& tok : tokenize(corpus.entries()[i].transcript)) {
      const long j = vocab.index_of(tok);
      if (j < 0) continue;
      double& cell = m(static_cast<Eigen::Index>(i), j);
      cell = binary ? 1.0 : cell + 1.0;
    }
  }
  return m;
}

Eigen::MatrixXd word_count_feature(const CorpusManifest& corpus) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(corpus.size()), 1);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    m(static_cast<Eigen::Index>(i), 0) =
        static_cast<double>(corpus.entries()[i].word_count);
  return m;
}

}  // namespace syntaxprobe
