#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "cdisc/error.hpp"
#include "cdisc/selection.hpp"
#include "oracles.hpp"

using namespace cdisc;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::stage_failed;
}

DistanceMatrix line(const std::vector<double>& xs) {
  std::vector<double> v;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) v.push_back(std::abs(xs[i] - xs[j]));
  return DistanceMatrix(xs.size(), v, Metric::euclidean);
}

ClusterAssignment assign(std::size_t k, std::vector<std::size_t> labels) { return {k, std::move(labels)}; }

}  // namespace

TEST(Silhouette, TwoPairExample) {
  const auto d = line({0, 1, 10, 11});
  const auto a = assign(2, {0, 0, 1, 1});
  EXPECT_NEAR(silhouette_point(0, a, d), 9.5 / 10.5, 1e-12);
  // s(1): a = 1, b = mean(9, 10) = 9.5.
  EXPECT_NEAR(silhouette_point(1, a, d), 8.5 / 9.5, 1e-12);
  const double mean = (2 * 9.5 / 10.5 + 2 * 8.5 / 9.5) / 4;
  // Oracle value; sqrt-free so it is exact up to rounding.
  EXPECT_NEAR(mean, 0.89974937343358397, 1e-15);
  EXPECT_NEAR(average_silhouette(a, d), mean, 1e-12);
  EXPECT_NEAR(silhouette_point(3, a, d), silhouette_point(0, a, d), 1e-15);
  EXPECT_NEAR(silhouette_point(2, a, d), silhouette_point(1, a, d), 1e-15);
}

TEST(Silhouette, Conventions) {
  const auto d = line({0, 1, 10});
  EXPECT_EQ(silhouette_point(2, assign(2, {0, 0, 1}), d), 0.0);
  // Point 1 sits midway: a == b.
  EXPECT_EQ(silhouette_point(1, assign(2, {0, 0, 1}), line({0, 1, 2})), 0.0);
  EXPECT_EQ(average_silhouette(assign(3, {0, 1, 2}), d), 0.0);
  EXPECT_EQ(code_of([&] { silhouette_point(0, assign(1, {0, 0, 0}), d); }), Errc::single_cluster);
  EXPECT_EQ(code_of([&] { silhouette_point(0, assign(2, {0, 1}), d); }), Errc::dimension_mismatch);
}

TEST(Silhouette, DuplicatedClustersScoreNonPositive) {
  // Two clusters occupying the same locations.
  const auto d = line({0, 5, 0, 5});
  EXPECT_LE(average_silhouette(assign(2, {0, 0, 1, 1}), d), 0.0);
}

TEST(Silhouette, MatchesDefinitionAndIsScaleFree) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 3 + rng() % 28;
    const std::size_t k = 2 + rng() % std::min<std::size_t>(5, n - 1);
    std::vector<double> v(n * (n - 1) / 2);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (auto& x : v) x = u(rng);
    DistanceMatrix d(n, v, Metric::euclidean);
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < k ? i : rng() % k;
    const auto a = assign(k, labels);
    auto scaled = v;
    for (auto& x : scaled) x *= 7;
    DistanceMatrix d7(n, scaled, Metric::euclidean);
    const auto full = oracle::square(n, v);
    const auto report = silhouette(a, d);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = silhouette_point(i, a, d);
      EXPECT_NEAR(s, oracle::silhouette(i, labels, full), 1e-9);
      EXPECT_GE(s, -1.0);
      EXPECT_LE(s, 1.0);
      EXPECT_NEAR(silhouette_point(i, a, d7), s, 1e-9);
      EXPECT_EQ(report.per_point[i], s);
      sum += s;
    }
    EXPECT_NEAR(report.average, sum / n, 1e-12);
  }
}

TEST(SweepK, Examples) {
  const auto d = line({0, 1, 10, 11});
  const auto dend = agglomerate(d, Linkage::average);
  const auto sweep = sweep_k(dend, d, 2, 3);
  EXPECT_EQ(sweep.best_k, 2u);
  EXPECT_EQ(sweep.curve.size(), 2u);
  EXPECT_NEAR(sweep.best_average, average_silhouette(cut(dend, 2), d), 1e-15);
  EXPECT_EQ(sweep_k(dend, d, 3, 3).best_k, 3u);
  EXPECT_EQ(code_of([&] { sweep_k(dend, d, 1, 3); }), Errc::k_out_of_range);
  EXPECT_EQ(code_of([&] { sweep_k(dend, d, 2, 4); }), Errc::k_out_of_range);
  EXPECT_EQ(code_of([&] { sweep_k(dend, d, 3, 2); }), Errc::k_out_of_range);
  EXPECT_EQ(default_k_max(4), 3u);
  EXPECT_EQ(default_k_max(1000), 300u);
}

TEST(SweepK, TiesGoToSmallerK) {
  // Four equidistant points: every cut scores the same.
  DistanceMatrix d(4, std::vector<double>(6, 1.0), Metric::euclidean);
  const auto sweep = sweep_k(agglomerate(d, Linkage::average), d, 2, 3);
  EXPECT_EQ(sweep.curve.at(2), sweep.curve.at(3));
  EXPECT_EQ(sweep.best_k, 2u);
}

TEST(SweepK, BestAttainsMaximumAndWorkersAgree) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 40;
    std::vector<double> v(n * (n - 1) / 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : v) x = u(rng);
    DistanceMatrix d(n, v, Metric::cosine);
    const auto dend = agglomerate(d, Linkage::average);
    const auto one = sweep_k(dend, d, 2, n - 1, 1);
    const auto many = sweep_k(dend, d, 2, n - 1, 4);
    EXPECT_EQ(one.curve, many.curve);
    EXPECT_EQ(one.best_k, many.best_k);
    double best = -2;
    for (const auto& [k, s] : one.curve) {
      EXPECT_GE(s, -1.0);
      EXPECT_LE(s, 1.0);
      best = std::max(best, s);
    }
    EXPECT_EQ(one.best_average, best);
    EXPECT_EQ(one.curve.at(one.best_k), best);
  }
}

TEST(SweepK, FileRoundTrip) {
  const auto d = line({0, 1, 10, 11, 30});
  const auto sweep = sweep_k(agglomerate(d, Linkage::average), d, 2, 4);
  const auto path = std::filesystem::temp_directory_path() / "cdisc_sweep.csv";
  save_sweep(path, sweep);
  const auto back = load_sweep(path);
  EXPECT_EQ(back.curve, sweep.curve);
  EXPECT_EQ(back.best_k, sweep.best_k);
  std::filesystem::remove(path);
}
