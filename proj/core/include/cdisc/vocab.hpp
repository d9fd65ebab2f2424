#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdisc/embedding_matrix.hpp"
#include "cdisc/preprocess.hpp"

namespace cdisc {

// Exact token counts. Ordered so that iteration (and anything written from
// it) is deterministic.
class FrequencyTable {
 public:
  void add(std::string_view token, std::uint64_t count = 1);
  // Associative and commutative; shards can be merged in any order.
  void merge(const FrequencyTable& other);

  std::uint64_t count(std::string_view token) const;
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const std::map<std::string, std::uint64_t, std::less<>>& entries() const { return counts_; }

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::map<std::string, std::uint64_t, std::less<>> counts_;
  std::uint64_t total_ = 0;
};

FrequencyTable count_frequencies(const TokenStream& corpus);
FrequencyTable count_frequencies(const std::vector<TokenStream>& corpus);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual bool is_noun(std::string_view token) const = 0;
};

// Noun lexicon first; tokens outside the lexicon are classified by suffix.
// Unknown tokens with no telling suffix fall back to `unknown_is_noun`.
class LexiconTagger : public PosTagger {
 public:
  LexiconTagger(std::unordered_set<std::string> nouns, bool unknown_is_noun = true);

  static LexiconTagger parse(std::string_view text, bool unknown_is_noun = true);
  static LexiconTagger load(const std::filesystem::path& path, bool unknown_is_noun = true);
  static LexiconTagger builtin(bool unknown_is_noun = true);

  bool is_noun(std::string_view token) const override;

 private:
  std::unordered_set<std::string> nouns_;
  bool unknown_is_noun_;
};

// Tagger learned from a corpus of "token/TAG" pairs. A token is a noun when
// its most frequent tag (ties: the noun reading) is a noun tag, i.e. Penn
// NN* or universal NOUN/PROPN. Untagged tokens are not nouns.
class PreTaggedTagger : public PosTagger {
 public:
  void observe(std::string_view token, std::string_view tag);
  bool is_noun(std::string_view token) const override;

 private:
  struct Votes {
    std::uint64_t noun = 0;
    std::uint64_t other = 0;
  };
  std::unordered_map<std::string, Votes> votes_;
};

struct PreTaggedCorpus {
  TokenStream tokens;
  PreTaggedTagger tagger;
};

// Whitespace separated "token/TAG" pairs, one sentence per line. The token
// is lowercased; pairs whose token is not purely alphabetic are skipped.
PreTaggedCorpus parse_pretagged(std::string_view text);
PreTaggedCorpus load_pretagged(const std::filesystem::path& path);

// Highest-count tokens the tagger accepts as nouns, ties by token ascending.
// Requires k >= 1 (Errc::invalid_argument).
std::vector<std::string> top_k_nouns(const FrequencyTable& freq, const PosTagger& tagger, std::size_t k);

struct CandidateFilterConfig {
  std::vector<std::string> candidates{"restaurant", "food", "beverage"};
  double threshold = 0.5;
};

// Keeps nouns whose smallest cosine distance to any candidate is strictly
// below the threshold. Nouns without a vector are dropped. Throws
// Errc::missing_candidate when a candidate has no vector.
std::vector<std::string> filter_by_candidates(const std::vector<std::string>& nouns, const EmbeddingMatrix& emb,
                                              const CandidateFilterConfig& cfg);

std::vector<std::string> read_token_list(const std::filesystem::path& path);
void write_token_list(const std::filesystem::path& path, const std::vector<std::string>& tokens);

}  // namespace cdisc
