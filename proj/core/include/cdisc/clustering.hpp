#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdisc/embedding_matrix.hpp"

namespace cdisc {

enum class Metric { cosine, euclidean };
enum class Linkage { single, complete, average };

std::string_view to_string(Metric metric);
std::string_view to_string(Linkage linkage);
Metric parse_metric(std::string_view name);
Linkage parse_linkage(std::string_view name);

// Condensed upper triangle of a symmetric n x n matrix with zero diagonal.
// Pair (i, j), i < j, lives at n*i - i*(i+1)/2 + (j - i - 1).
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, Metric metric);
  // Throws Errc::dimension_mismatch if values.size() != n(n-1)/2 and
  // Errc::invalid_argument for negative or non-finite entries.
  DistanceMatrix(std::size_t n, std::vector<double> values, Metric metric);

  std::size_t n() const { return n_; }
  Metric metric() const { return metric_; }
  const std::vector<double>& values() const { return values_; }

  static std::size_t index(std::size_t n, std::size_t i, std::size_t j) {
    return n * i - i * (i + 1) / 2 + (j - i - 1);
  }

  // Symmetric access; at(i, i) == 0.
  double at(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return values_[index(n_, i, j)];
  }
  void set(std::size_t i, std::size_t j, double value) {
    if (i > j) std::swap(i, j);
    values_[index(n_, i, j)] = value;
  }

 private:
  std::size_t n_ = 0;
  Metric metric_ = Metric::euclidean;
  std::vector<double> values_;
};

// Throws Errc::unknown_token for items missing from emb and
// Errc::too_few_items when fewer than two items are given.
DistanceMatrix pairwise_distances(const EmbeddingMatrix& emb, const std::vector<std::string>& items, Metric metric);

// Merge m joins nodes `left` and `right` into node n + m. Leaves are 0..n-1.
// `left` is the child holding the smaller leaf index.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;

  friend bool operator==(const Merge&, const Merge&) = default;
};

class Dendrogram {
 public:
  Dendrogram() = default;
  // Validates structure: n-1 merges, every node used at most once, children
  // created before their parent, sizes consistent. Throws Errc::parse.
  Dendrogram(std::size_t leaves, std::vector<Merge> merges);

  std::size_t leaves() const { return leaves_; }
  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t root() const { return leaves_ + merges_.size() - 1; }

  // Leaf ids under node `node`, in ascending order.
  std::vector<std::size_t> members(std::size_t node) const;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;

 private:
  std::size_t leaves_ = 0;
  std::vector<Merge> merges_;
};

// Repeatedly merges the closest pair of clusters, updating inter-cluster
// distances with the Lance-Williams recurrence. Ties go to the pair with the
// smallest (min node id, max node id). Requires n >= 2.
Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage);

// t(i, j): height of the lowest merge joining i and j.
DistanceMatrix cophenetic_matrix(const Dendrogram& dend, Metric metric = Metric::euclidean);

// Pearson correlation between the condensed entries of dist and coph.
// Throws Errc::degenerate_variance when either side is constant and
// Errc::dimension_mismatch when the sizes differ.
double cophenetic_coefficient(const DistanceMatrix& dist, const DistanceMatrix& coph);

struct CopheneticResult {
  double coefficient = 0.0;
  DistanceMatrix cophenetic;
};

CopheneticResult cophenetic_correlation(const DistanceMatrix& dist, const Dendrogram& dend);

struct NamedModel {
  std::string name;
  EmbeddingMatrix vectors;
};

struct ModelScore {
  std::string name;
  double coefficient = 0.0;
};

struct ModelComparison {
  // Sorted by coefficient descending; ties keep input order.
  std::vector<ModelScore> ranking;
  std::vector<std::string> items;
  // Items dropped because at least one model has no vector for them.
  std::vector<std::string> dropped;

  const ModelScore& winner() const { return ranking.front(); }
};

ModelComparison compare_models(const std::vector<NamedModel>& models, const std::vector<std::string>& items,
                               Metric metric, Linkage linkage);

// Item -> cluster id. Ids run 0..k-1 in order of each cluster's smallest member.
struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> labels;

  std::vector<std::vector<std::size_t>> clusters() const;
  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

// Undoes the last k-1 merges. Throws Errc::k_out_of_range unless 1 <= k <= n.
ClusterAssignment cut(const Dendrogram& dend, std::size_t k);

// One JSON object {"left","right","height","size"} per line.
std::string format_dendrogram(const Dendrogram& dend);
Dendrogram parse_dendrogram(std::string_view text);
void save_dendrogram(const std::filesystem::path& path, const Dendrogram& dend);
Dendrogram load_dendrogram(const std::filesystem::path& path);

// Sidecar table: "<id>\t<token>" per line.
void save_item_table(const std::filesystem::path& path, const std::vector<std::string>& items);
std::vector<std::string> load_item_table(const std::filesystem::path& path);

// Header "<n> <metric>", then one condensed value per line (17 significant
// digits, so values survive a round trip exactly).
void save_distances(const std::filesystem::path& path, const DistanceMatrix& dist);
DistanceMatrix load_distances(const std::filesystem::path& path);

// "<item>\t<token>\t<cluster>" per line; token column is empty when unknown.
void save_assignment(const std::filesystem::path& path, const ClusterAssignment& assignment,
                     const std::vector<std::string>& items);
ClusterAssignment load_assignment(const std::filesystem::path& path);

}  // namespace cdisc
