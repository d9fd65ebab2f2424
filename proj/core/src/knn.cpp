#include <algorithm>
#include <numeric>

#include "cdisc/classify.hpp"
#include "cdisc/error.hpp"

namespace cdisc {

KnnClassifier::KnnClassifier(LabeledDataset train, KnnConfig cfg) : train_(std::move(train)), cfg_(cfg) {
  if (cfg_.k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
  if (train_.empty()) throw Error(Errc::empty_dataset, "training set is empty");
  if (cfg_.k > train_.size()) {
    throw Error(Errc::k_exceeds_data, "k = " + std::to_string(cfg_.k) + " exceeds " +
                                          std::to_string(train_.size()) + " training rows");
  }
}

std::size_t KnnClassifier::predict(std::span<const double> x) const {
  if (x.size() != train_.dim) throw Error(Errc::dimension_mismatch, "query has the wrong dimension");
  std::vector<std::pair<double, std::size_t>> dist(train_.size());
  for (std::size_t i = 0; i < train_.size(); ++i) {
    const auto row = train_.row(i);
    dist[i] = {cfg_.metric == Metric::cosine ? cosine_distance(x, row) : euclidean_distance(x, row), i};
  }
  // Equal distances resolve by training row order.
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(cfg_.k), dist.end());

  struct Tally {
    std::size_t votes = 0;
    double distance = 0.0;
  };
  std::vector<Tally> tally(std::max<std::size_t>(train_.label_names.size(),
                                                 *std::max_element(train_.labels.begin(), train_.labels.end()) + 1));
  for (std::size_t j = 0; j < cfg_.k; ++j) {
    auto& t = tally[train_.labels[dist[j].second]];
    ++t.votes;
    t.distance += dist[j].first;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < tally.size(); ++c) {
    const auto& a = tally[c];
    const auto& b = tally[best];
    if (a.votes > b.votes || (a.votes == b.votes && a.votes > 0 && a.distance < b.distance)) best = c;
  }
  return best;
}

KnnClassifier train_knn(const LabeledDataset& train, const KnnConfig& cfg) { return KnnClassifier(train, cfg); }

}  // namespace cdisc
