#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "cdisc/classify.hpp"
#include "cdisc/error.hpp"
#include "rng.hpp"

namespace cdisc {
namespace {

std::size_t majority(const std::vector<std::size_t>& counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& data, std::size_t classes, const ForestConfig& cfg, std::uint64_t seed)
      : data_(data), classes_(classes), cfg_(cfg), rng_(seed) {
    max_features_ = cfg.max_features ? std::min(cfg.max_features, data.dim)
                                     : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(data.dim))));
    max_features_ = std::max<std::size_t>(max_features_, 1);
  }

  DecisionTree build() {
    std::vector<std::size_t> rows(data_.size());
    if (cfg_.bootstrap) {
      for (auto& r : rows) r = detail::uniform_index(rng_, data_.size());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    struct Work {
      std::uint32_t node;
      std::size_t begin, end, depth;
    };
    nodes_.push_back({});
    std::vector<Work> stack{{0, 0, rows.size(), 0}};
    while (!stack.empty()) {
      auto w = stack.back();
      stack.pop_back();
      std::span<std::size_t> span(rows.data() + w.begin, w.end - w.begin);
      std::vector<std::size_t> counts(classes_, 0);
      for (auto r : span) ++counts[data_.labels[r]];
      std::size_t label = majority(counts);
      nodes_[w.node].label = label;
      const bool pure = counts[label] == span.size();
      if (pure || span.size() < cfg_.min_samples_split || (cfg_.max_depth && w.depth >= cfg_.max_depth)) continue;

      auto best = find_split(span, counts);
      if (!best) continue;
      auto mid = std::partition(span.begin(), span.end(), [&](std::size_t r) {
        return data_.row(r)[best->feature] <= best->threshold;
      });
      const std::size_t split_at = w.begin + static_cast<std::size_t>(mid - span.begin());
      const auto left = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back({});
      nodes_.push_back({});
      auto& n = nodes_[w.node];
      n.feature = static_cast<std::int64_t>(best->feature);
      n.threshold = best->threshold;
      n.left = left;
      n.right = left + 1;
      stack.push_back({left + 1, split_at, w.end, w.depth + 1});
      stack.push_back({left, w.begin, split_at, w.depth + 1});
    }
    return DecisionTree(std::move(nodes_));
  }

 private:
  struct Split {
    std::size_t feature;
    double threshold;
    double impurity;
  };

  static double gini_sum(const std::vector<std::size_t>& counts, std::size_t total) {
    // total * gini, so child impurities add up weighted by size.
    if (total == 0) return 0.0;
    double sq = 0.0;
    for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
    return static_cast<double>(total) - sq / static_cast<double>(total);
  }

  std::optional<Split> find_split(std::span<const std::size_t> rows, const std::vector<std::size_t>& counts) {
    std::vector<std::size_t> features(data_.dim);
    std::iota(features.begin(), features.end(), 0);
    detail::shuffle(features.begin(), features.end(), rng_);

    std::optional<Split> best;
    std::vector<std::pair<double, std::size_t>> values(rows.size());
    std::size_t tried = 0;
    for (auto f : features) {
      if (tried == max_features_) break;
      for (std::size_t i = 0; i < rows.size(); ++i) values[i] = {data_.row(rows[i])[f], data_.labels[rows[i]]};
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;
      ++tried;
      std::vector<std::size_t> left(classes_, 0), right = counts;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        ++left[values[i].second];
        --right[values[i].second];
        const double a = values[i].first, b = values[i + 1].first;
        if (a == b) continue;
        const double impurity = gini_sum(left, i + 1) + gini_sum(right, values.size() - i - 1);
        if (!best || impurity < best->impurity) {
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = Split{f, t, impurity};
        }
      }
    }
    return best;
  }

  const LabeledDataset& data_;
  std::size_t classes_;
  const ForestConfig& cfg_;
  detail::Rng rng_;
  std::size_t max_features_ = 1;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::size_t DecisionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) throw Error(Errc::invalid_model, "empty decision tree");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].label;
}

std::size_t RandomForest::predict(std::span<const double> x) const {
  if (trees_.empty()) throw Error(Errc::invalid_model, "forest has no trees");
  std::vector<std::size_t> votes(classes_, 0);
  for (const auto& t : trees_) ++votes.at(t.predict(x));
  return majority(votes);
}

RandomForest train_random_forest(const LabeledDataset& train, const ForestConfig& cfg) {
  if (train.empty()) throw Error(Errc::empty_dataset, "training set is empty");
  if (cfg.trees == 0) throw Error(Errc::invalid_argument, "forest needs at least one tree");
  const std::size_t classes = std::max<std::size_t>(
      train.label_names.size(), *std::max_element(train.labels.begin(), train.labels.end()) + 1);
  std::vector<DecisionTree> trees(cfg.trees);
  auto grow = [&](std::size_t t) {
    trees[t] = TreeBuilder(train, classes, cfg, detail::derive_seed(cfg.seed, t)).build();
  };
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, cfg.trees);
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.trees; ++t) grow(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < cfg.trees; t += workers) grow(t);
      });
    }
  }
  return RandomForest(std::move(trees), classes, cfg);
}

}  // namespace cdisc
