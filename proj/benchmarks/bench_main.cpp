#include <benchmark/benchmark.h>

#include <random>

#include "cdisc/clustering.hpp"
#include "cdisc/embedding.hpp"
#include "cdisc/preprocess.hpp"
#include "cdisc/selection.hpp"
#include "cdisc/synthetic.hpp"

using namespace cdisc;

namespace {

DistanceMatrix random_distances(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> nd;
  std::vector<std::string> names;
  std::vector<double> values(n * dim);
  for (std::size_t i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
  for (auto& v : values) v = nd(rng);
  return pairwise_distances(EmbeddingMatrix(names, dim, values), names, Metric::cosine);
}

TokenStream synthetic_tokens() {
  SyntheticConfig cfg;
  cfg.noise_rate = 0.0;
  TokenStream out;
  for (const auto& doc : generate_synthetic(cfg).documents) {
    auto s = preprocess(RawDocument{"", doc}, StopwordList::builtin(), Lemmatizer::builtin());
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

void BM_Agglomerate(benchmark::State& state) {
  const auto d = random_distances(static_cast<std::size_t>(state.range(0)), 50);
  for (auto _ : state) benchmark::DoNotOptimize(agglomerate(d, Linkage::average));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Agglomerate)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_PairwiseCosine(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(random_distances(static_cast<std::size_t>(state.range(0)), 300));
}
BENCHMARK(BM_PairwiseCosine)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SweepK(benchmark::State& state) {
  const std::size_t n = 400;
  const auto d = random_distances(n, 50);
  const auto dend = agglomerate(d, Linkage::average);
  const auto workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep_k(dend, d, 2, 100, workers));
}
BENCHMARK(BM_SweepK)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SkipGramEpoch(benchmark::State& state) {
  const auto corpus = synthetic_tokens();
  auto cfg = TrainConfig::defaults(Architecture::skipgram);
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.epochs = 1;
  std::int64_t tokens = 0;
  for (const auto& s : corpus) tokens += static_cast<std::int64_t>(s.size());
  for (auto _ : state) benchmark::DoNotOptimize(train_word2vec(corpus, cfg));
  state.SetItemsProcessed(state.iterations() * tokens);
}
BENCHMARK(BM_SkipGramEpoch)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_GloveEpoch(benchmark::State& state) {
  const auto corpus = synthetic_tokens();
  auto cfg = TrainConfig::defaults(Architecture::glove);
  cfg.dim = 50;
  cfg.epochs = 1;
  const auto vocab = build_vocab(count_frequencies(corpus), 5);
  std::vector<std::string> words;
  for (const auto& v : vocab) words.push_back(v.token);
  const auto cooc = build_cooccurrence(corpus, words, cfg.window, true);
  for (auto _ : state) benchmark::DoNotOptimize(train_glove(cooc, cfg));
}
BENCHMARK(BM_GloveEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
