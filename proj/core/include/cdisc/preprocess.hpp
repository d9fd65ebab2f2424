#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cdisc {

struct RawDocument {
  std::string id;
  std::string text;
};

using Sentence = std::vector<std::string>;
// Sentence-delimited token lists. After clean() + lemmatize() every token
// matches [a-z]+ and is a fixed point of the lemmatizer.
using TokenStream = std::vector<Sentence>;

class StopwordList {
 public:
  StopwordList() = default;
  // Entries are lowercased and deduplicated.
  explicit StopwordList(const std::vector<std::string>& words);

  static StopwordList parse(std::string_view text);
  static StopwordList load(const std::filesystem::path& path);
  static StopwordList builtin();

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Rule-based English suffix stripper backed by an irregular-form table.
// lemma() is idempotent: lemma(lemma(w)) == lemma(w) for every input.
class Lemmatizer {
 public:
  Lemmatizer() = default;
  // Each pair maps an inflected form to its lemma. Chains are resolved.
  explicit Lemmatizer(const std::vector<std::pair<std::string, std::string>>& exceptions);

  // Lines of "<inflected> <lemma>"; blank lines and '#' comments ignored.
  static Lemmatizer parse(std::string_view text);
  static Lemmatizer load(const std::filesystem::path& path);
  static Lemmatizer builtin();

  std::string lemma(std::string_view word) const;

 private:
  bool is_fixed_point(const std::string& word) const;

  std::unordered_map<std::string, std::string> exceptions_;
  std::unordered_set<std::string> protected_;
};

// Splits on '.', '!' and '?' into sentences and on whitespace and ASCII
// punctuation into tokens. Casing, digits and non-ASCII codepoints are kept.
TokenStream tokenize(const RawDocument& doc);

// Drops tokens with any non [A-Za-z] byte, lowercases, removes stopwords.
// Sentences left empty are dropped.
TokenStream clean(const TokenStream& stream, const StopwordList& stops);

TokenStream lemmatize(const TokenStream& stream, const Lemmatizer& lemmatizer);

// tokenize -> clean -> lemmatize. The lemmatizer can turn a surviving token
// into a stopword ("was" -> "be"), so stopwords are filtered once more.
TokenStream preprocess(const RawDocument& doc, const StopwordList& stops,
                       const Lemmatizer& lemmatizer);

// A regular file is read as one document per line; a directory contributes
// one document per *.txt file, in lexicographic path order.
std::vector<RawDocument> read_corpus(const std::filesystem::path& path);

// One sentence per line, tokens separated by a single space.
void write_token_stream(const std::filesystem::path& path, const TokenStream& stream);
TokenStream read_token_stream(const std::filesystem::path& path);

}  // namespace cdisc
