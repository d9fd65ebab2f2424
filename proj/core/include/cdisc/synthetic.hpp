#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cdisc {

// A planted-concept corpus: each sentence draws its content words from one
// concept, so concepts form disjoint co-occurrence blocks.
struct SyntheticConfig {
  std::size_t concepts = 6;
  std::size_t words_per_concept = 30;
  std::size_t sentences = 3000;
  std::size_t min_length = 6;
  std::size_t max_length = 12;
  // Per-token chance of a shared non-noun filler word.
  double filler_rate = 0.15;
  // Per-token chance of a word from a different concept.
  double cross_rate = 0.02;
  // Per-token chance of surface noise (capitals, digits, stopwords, punctuation).
  double noise_rate = 0.1;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  // One raw document per line.
  std::vector<std::string> documents;
  std::vector<std::vector<std::string>> concepts;
  std::vector<std::string> fillers;
};

// Planted words are lowercase alphabetic pseudo-words that survive
// preprocessing unchanged and are distinct from the default stopwords.
SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg);

struct FixturePaths {
  std::filesystem::path corpus;
  std::filesystem::path nouns;
  std::filesystem::path truth;
  std::filesystem::path config;
};

// Writes corpus.txt, nouns.txt (planted words), truth.tsv ("<token>\t<concept>")
// and pipeline.conf into `dir`. The config writes its outputs to dir/out.
FixturePaths write_fixture(const std::filesystem::path& dir, const SyntheticConfig& cfg = {});

}  // namespace cdisc
