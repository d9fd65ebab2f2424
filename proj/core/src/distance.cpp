#include <cmath>

#include "cdisc/clustering.hpp"
#include "cdisc/error.hpp"

namespace cdisc {

std::string_view to_string(Metric metric) {
  return metric == Metric::cosine ? "cosine" : "euclidean";
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::cosine;
  if (name == "euclidean") return Metric::euclidean;
  throw Error(Errc::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

Linkage parse_linkage(std::string_view name) {
  if (name == "single") return Linkage::single;
  if (name == "complete") return Linkage::complete;
  if (name == "average") return Linkage::average;
  throw Error(Errc::invalid_argument, "unknown linkage '" + std::string(name) + "'");
}

DistanceMatrix::DistanceMatrix(std::size_t n, Metric metric)
    : n_(n), metric_(metric), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values, Metric metric)
    : n_(n), metric_(metric), values_(std::move(values)) {
  const std::size_t expected = n < 2 ? 0 : n * (n - 1) / 2;
  if (values_.size() != expected) {
    throw Error(Errc::dimension_mismatch, "condensed matrix for n=" + std::to_string(n) + " needs " +
                                              std::to_string(expected) + " values, got " +
                                              std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw Error(Errc::invalid_argument, "distances must be finite and >= 0");
  }
}

DistanceMatrix pairwise_distances(const EmbeddingMatrix& emb, const std::vector<std::string>& items, Metric metric) {
  if (items.size() < 2) throw Error(Errc::too_few_items, "pairwise distances need at least two items");
  std::vector<std::span<const double>> rows;
  rows.reserve(items.size());
  for (const auto& item : items) {
    auto idx = emb.index_of(item);
    if (!idx) throw Error(Errc::unknown_token, "item not in embedding vocabulary: '" + item + "'");
    rows.push_back(emb.row(*idx));
  }
  const std::size_t n = items.size();
  DistanceMatrix dist(n, metric);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist.set(i, j, metric == Metric::cosine ? cosine_distance(rows[i], rows[j])
                                              : euclidean_distance(rows[i], rows[j]));
    }
  }
  return dist;
}

}  // namespace cdisc
