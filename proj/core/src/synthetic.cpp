#include "cdisc/synthetic.hpp"

#include <set>

#include "cdisc/error.hpp"
#include "cdisc/preprocess.hpp"
#include "rng.hpp"
#include "text_io.hpp"

namespace cdisc {
namespace {

constexpr std::string_view kOnsets = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string pseudo_word(detail::Rng& rng) {
  std::string w;
  const auto syllables = 2 + detail::uniform_index(rng, 2);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += kOnsets[detail::uniform_index(rng, kOnsets.size())];
    w += kVowels[detail::uniform_index(rng, kVowels.size())];
  }
  if (detail::uniform_index(rng, 3) == 0) w += "n";
  return w;
}

const std::vector<std::string> kFillers{"quickly", "wonderful", "famous", "expensive", "comfortable",
                                        "careless", "stylish",  "friendly", "massive", "useful"};
const std::vector<std::string> kNoiseStops{"the", "and", "with", "was", "very", "of", "a", "it"};

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.concepts < 2 || cfg.words_per_concept < 2) {
    throw Error(Errc::invalid_argument, "need at least two concepts of two words");
  }
  if (cfg.min_length == 0 || cfg.max_length < cfg.min_length) {
    throw Error(Errc::invalid_argument, "bad sentence length range");
  }
  detail::Rng rng(detail::derive_seed(cfg.seed, 0x5e7));
  const auto stops = StopwordList::builtin();
  const auto lemmatizer = Lemmatizer::builtin();

  SyntheticCorpus out;
  for (const auto& f : kFillers) {
    if (lemmatizer.lemma(f) == f && !stops.contains(f)) out.fillers.push_back(f);
  }
  std::set<std::string> used(out.fillers.begin(), out.fillers.end());
  out.concepts.resize(cfg.concepts);
  for (auto& concept_words : out.concepts) {
    while (concept_words.size() < cfg.words_per_concept) {
      auto w = pseudo_word(rng);
      if (used.count(w) || stops.contains(w) || lemmatizer.lemma(w) != w) continue;
      used.insert(w);
      concept_words.push_back(w);
    }
  }

  for (std::size_t s = 0; s < cfg.sentences; ++s) {
    const auto c = detail::uniform_index(rng, cfg.concepts);
    const auto len = cfg.min_length + detail::uniform_index(rng, cfg.max_length - cfg.min_length + 1);
    std::string line;
    for (std::uint64_t t = 0; t < len; ++t) {
      std::string word;
      const double u = detail::uniform01(rng);
      if (u < cfg.filler_rate && !out.fillers.empty()) {
        word = out.fillers[detail::uniform_index(rng, out.fillers.size())];
      } else if (u < cfg.filler_rate + cfg.cross_rate) {
        const auto& other = out.concepts[detail::uniform_index(rng, cfg.concepts)];
        word = other[detail::uniform_index(rng, other.size())];
      } else {
        word = out.concepts[c][detail::uniform_index(rng, cfg.words_per_concept)];
      }
      if (detail::uniform01(rng) < cfg.noise_rate) {
        switch (detail::uniform_index(rng, 4)) {
          case 0: word[0] = static_cast<char>(word[0] - 'a' + 'A'); break;
          case 1: word += "," ; break;
          case 2: line += std::to_string(detail::uniform_index(rng, 100)) + " "; break;
          default: line += kNoiseStops[detail::uniform_index(rng, kNoiseStops.size())] + " "; break;
        }
      }
      line += word;
      line += t + 1 == len ? "" : " ";
    }
    line += detail::uniform_index(rng, 4) == 0 ? "!" : ".";
    // Two sentences per document on average.
    if (!out.documents.empty() && detail::uniform_index(rng, 2) == 0) {
      out.documents.back() += " " + line;
    } else {
      out.documents.push_back(std::move(line));
    }
  }
  return out;
}

FixturePaths write_fixture(const std::filesystem::path& dir, const SyntheticConfig& cfg) {
  const auto corpus = generate_synthetic(cfg);
  FixturePaths paths{dir / "corpus.txt", dir / "nouns.txt", dir / "truth.tsv", dir / "pipeline.conf"};

  std::string text;
  for (const auto& d : corpus.documents) text += d + "\n";
  detail::write_file(paths.corpus, text);

  std::string nouns, truth;
  for (std::size_t c = 0; c < corpus.concepts.size(); ++c) {
    for (const auto& w : corpus.concepts[c]) {
      nouns += w + "\n";
      truth += w + "\tconcept" + std::to_string(c) + "\n";
    }
  }
  detail::write_file(paths.nouns, nouns);
  detail::write_file(paths.truth, truth);

  const std::string conf =
      "# Synthetic planted-concept fixture. Relative paths resolve against this file.\n"
      "corpus.path=corpus.txt\n"
      "output.dir=out\n"
      "nouns.lexicon=nouns.txt\n"
      "nouns.unknown_is_noun=false\n"
      "nouns.k=1000\n"
      "# The planted vocabulary has no restaurant/food/beverage seeds.\n"
      "nouns.candidates=\n"
      "embedding.arch=skipgram,cbow\n"
      "embedding.dim=50\n"
      "embedding.window=5\n"
      "embedding.min_count=5\n"
      "embedding.epochs=5\n"
      "cluster.metric=cosine\n"
      "cluster.linkage=average\n"
      "select.k_min=2\n"
      "classify.models=mlp,knn,rf\n"
      "classify.train_fraction=0.8\n"
      "seed=" + std::to_string(cfg.seed) + "\n"
      "workers=1\n";
  detail::write_file(paths.config, conf);
  return paths;
}

}  // namespace cdisc
