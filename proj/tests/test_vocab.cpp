#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <set>

#include "cdisc/error.hpp"
#include "cdisc/vocab.hpp"

using namespace cdisc;

namespace {

class SetTagger : public PosTagger {
 public:
  explicit SetTagger(std::set<std::string> nouns) : nouns_(std::move(nouns)) {}
  bool is_noun(std::string_view t) const override { return nouns_.count(std::string(t)) > 0; }

 private:
  std::set<std::string> nouns_;
};

FrequencyTable table(std::initializer_list<std::pair<const char*, std::uint64_t>> entries) {
  FrequencyTable f;
  for (auto [t, c] : entries) f.add(t, c);
  return f;
}

}  // namespace

TEST(CountFrequencies, Examples) {
  auto f = count_frequencies(TokenStream{{"food", "good", "food"}});
  EXPECT_EQ(f.count("food"), 2u);
  EXPECT_EQ(f.count("good"), 1u);
  EXPECT_EQ(f.total(), 3u);
  EXPECT_TRUE(count_frequencies(TokenStream{}).empty());
  TokenStream tea(1000, Sentence{"tea"});
  EXPECT_EQ(count_frequencies(tea).count("tea"), 1000u);
}

TEST(CountFrequencies, ShardMergeIsAssociativeAndCommutative) {
  std::mt19937_64 rng(3);
  std::vector<std::string> words{"a", "b", "c", "d", "e"};
  std::vector<TokenStream> shards(4);
  for (auto& s : shards) {
    for (int i = 0; i < 20; ++i) s.push_back({words[rng() % words.size()], words[rng() % words.size()]});
  }
  const auto whole = count_frequencies(shards);
  FrequencyTable left, right;
  for (std::size_t i = 0; i < shards.size(); ++i) left.merge(count_frequencies(shards[i]));
  for (std::size_t i = shards.size(); i-- > 0;) right.merge(count_frequencies(shards[i]));
  EXPECT_EQ(left, whole);
  EXPECT_EQ(right, whole);
}

TEST(TopKNouns, Examples) {
  SetTagger tagger({"food", "menu", "a", "b"});
  EXPECT_EQ(top_k_nouns(table({{"food", 5}, {"eat", 3}, {"menu", 2}}), tagger, 2),
            (std::vector<std::string>{"food", "menu"}));
  EXPECT_EQ(top_k_nouns(table({{"a", 1}}), tagger, 1), (std::vector<std::string>{"a"}));
  EXPECT_EQ(top_k_nouns(table({{"b", 2}, {"a", 2}}), tagger, 1), (std::vector<std::string>{"a"}));
  EXPECT_EQ(top_k_nouns(table({{"food", 1}}), tagger, 10).size(), 1u);
  try {
    top_k_nouns(table({{"a", 1}}), tagger, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

TEST(TopKNouns, LengthAndCountsNonIncreasing) {
  std::mt19937_64 rng(9);
  LexiconTagger tagger({}, true);
  for (int trial = 0; trial < 50; ++trial) {
    FrequencyTable f;
    for (int i = 0; i < 40; ++i) f.add("w" + std::string(1, static_cast<char>('a' + rng() % 26)), 1 + rng() % 5);
    const std::size_t k = 1 + rng() % 30;
    auto top = top_k_nouns(f, tagger, k);
    EXPECT_LE(top.size(), k);
    for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(f.count(top[i - 1]), f.count(top[i]));
  }
}

TEST(LexiconTagger, LexiconSuffixAndFallback) {
  LexiconTagger strict({"menu"}, false);
  EXPECT_TRUE(strict.is_noun("menu"));
  EXPECT_TRUE(strict.is_noun("reservation"));
  EXPECT_FALSE(strict.is_noun("quickly"));
  EXPECT_FALSE(strict.is_noun("zzz"));
  LexiconTagger lenient({}, true);
  EXPECT_TRUE(lenient.is_noun("zzz"));
  EXPECT_FALSE(lenient.is_noun("delicious"));
  EXPECT_TRUE(LexiconTagger::builtin().is_noun("restaurant"));
}

TEST(PreTagged, MajorityTagDecides) {
  auto corpus = parse_pretagged("The/DT food/NN was/VBD good/JJ ./.\nfood/NN order/VB order/NN order/NN 42/CD\n");
  EXPECT_EQ(corpus.tokens.size(), 2u);
  EXPECT_TRUE(corpus.tagger.is_noun("food"));
  EXPECT_TRUE(corpus.tagger.is_noun("order"));
  EXPECT_FALSE(corpus.tagger.is_noun("good"));
  EXPECT_FALSE(corpus.tagger.is_noun("unseen"));
  EXPECT_EQ(corpus.tokens[1], (Sentence{"food", "order", "order", "order"}));
}

TEST(CandidateFilter, Examples) {
  EmbeddingMatrix emb({"w", "o", "c"}, 2, {1, 0.1, 0, 1, 1, 0});
  CandidateFilterConfig cfg{{"c"}, 0.5};
  // 1 - 1/sqrt(1.01)
  EXPECT_NEAR(cosine_distance(emb.at("w"), emb.at("c")), 1.0 - 1.0 / std::sqrt(1.01), 1e-12);
  EXPECT_NEAR(cosine_distance(emb.at("w"), emb.at("c")), 0.00496, 1e-5);
  EXPECT_EQ(filter_by_candidates({"w", "o", "absent"}, emb, cfg), (std::vector<std::string>{"w"}));
  try {
    filter_by_candidates({"w"}, emb, {{"nope"}, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_candidate);
  }
}

TEST(CandidateFilter, MinimumOverCandidates) {
  EmbeddingMatrix emb({"w", "c1", "c2"}, 2, {0, 1, 1, 0, 0.1, 1});
  EXPECT_EQ(filter_by_candidates({"w"}, emb, {{"c1", "c2"}, 0.5}).size(), 1u);
  EXPECT_TRUE(filter_by_candidates({"w"}, emb, {{"c1"}, 0.5}).empty());
}

TEST(CandidateFilter, SubsetOrderAndThresholdMonotonicity) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  std::vector<std::string> vocab;
  std::vector<double> values;
  for (int i = 0; i < 60; ++i) {
    vocab.push_back("t" + std::to_string(i));
    for (int d = 0; d < 4; ++d) values.push_back(nd(rng));
  }
  EmbeddingMatrix emb(vocab, 4, values);
  std::vector<std::string> nouns(vocab.begin() + 2, vocab.end());
  nouns.push_back("missing");
  std::vector<std::string> previous;
  for (double th = 0.0; th <= 2.01; th += 0.1) {
    auto kept = filter_by_candidates(nouns, emb, {{"t0", "t1"}, th});
    std::size_t pos = 0;
    for (const auto& k : kept) {
      while (pos < nouns.size() && nouns[pos] != k) ++pos;
      ASSERT_LT(pos, nouns.size());
    }
    for (const auto& p : previous) EXPECT_NE(std::find(kept.begin(), kept.end(), p), kept.end());
    previous = kept;
  }
}
