#include <algorithm>
#include <cmath>

#include "cdisc/clustering.hpp"
#include "cdisc/error.hpp"

namespace cdisc {

DistanceMatrix cophenetic_matrix(const Dendrogram& dend, Metric metric) {
  const std::size_t n = dend.leaves();
  DistanceMatrix coph(n, metric);
  std::vector<std::vector<std::size_t>> members(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  const auto& merges = dend.merges();
  for (std::size_t m = 0; m < merges.size(); ++m) {
    auto& left = members[merges[m].left];
    auto& right = members[merges[m].right];
    for (std::size_t i : left) {
      for (std::size_t j : right) coph.set(i, j, merges[m].height);
    }
    auto& joined = members[n + m];
    joined.reserve(left.size() + right.size());
    joined.insert(joined.end(), left.begin(), left.end());
    joined.insert(joined.end(), right.begin(), right.end());
    std::vector<std::size_t>().swap(left);
    std::vector<std::size_t>().swap(right);
  }
  return coph;
}

double cophenetic_coefficient(const DistanceMatrix& dist, const DistanceMatrix& coph) {
  if (dist.n() != coph.n()) throw Error(Errc::dimension_mismatch, "distance and cophenetic matrices differ in size");
  const auto& x = dist.values();
  const auto& t = coph.values();
  if (x.empty()) throw Error(Errc::too_few_items, "cophenetic coefficient needs at least two items");
  const double count = static_cast<double>(x.size());
  double x_mean = 0.0, t_mean = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    x_mean += x[p];
    t_mean += t[p];
  }
  x_mean /= count;
  t_mean /= count;
  double sxt = 0.0, sxx = 0.0, stt = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double dx = x[p] - x_mean;
    const double dt = t[p] - t_mean;
    sxt += dx * dt;
    sxx += dx * dx;
    stt += dt * dt;
  }
  if (sxx <= 0.0 || stt <= 0.0) {
    throw Error(Errc::degenerate_variance, "cophenetic coefficient undefined: constant distances");
  }
  return std::clamp(sxt / std::sqrt(sxx * stt), -1.0, 1.0);
}

CopheneticResult cophenetic_correlation(const DistanceMatrix& dist, const Dendrogram& dend) {
  CopheneticResult result;
  result.cophenetic = cophenetic_matrix(dend, dist.metric());
  result.coefficient = cophenetic_coefficient(dist, result.cophenetic);
  return result;
}

ModelComparison compare_models(const std::vector<NamedModel>& models, const std::vector<std::string>& items,
                               Metric metric, Linkage linkage) {
  if (models.empty()) throw Error(Errc::invalid_argument, "compare_models needs at least one model");
  ModelComparison out;
  for (const auto& item : items) {
    bool everywhere = std::all_of(models.begin(), models.end(),
                                  [&](const NamedModel& m) { return m.vectors.contains(item); });
    (everywhere ? out.items : out.dropped).push_back(item);
  }
  for (const auto& model : models) {
    auto dist = pairwise_distances(model.vectors, out.items, metric);
    auto dend = agglomerate(dist, linkage);
    out.ranking.push_back({model.name, cophenetic_coefficient(dist, cophenetic_matrix(dend, metric))});
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const ModelScore& a, const ModelScore& b) { return a.coefficient > b.coefficient; });
  return out;
}

}  // namespace cdisc
