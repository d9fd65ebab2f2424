#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <vector>

#include "cdisc/clustering.hpp"

namespace cdisc {

// s(i) = (b - a) / max(a, b), where a is the mean distance from i to the
// rest of its cluster and b the smallest mean distance from i to another
// cluster. Members of singleton clusters score 0. Throws
// Errc::single_cluster with fewer than two clusters and
// Errc::dimension_mismatch when the assignment does not cover the matrix.
double silhouette_point(std::size_t i, const ClusterAssignment& assignment, const DistanceMatrix& dist);

struct SilhouetteReport {
  std::size_t k = 0;
  std::vector<double> per_point;
  double average = 0.0;
};

SilhouetteReport silhouette(const ClusterAssignment& assignment, const DistanceMatrix& dist);
double average_silhouette(const ClusterAssignment& assignment, const DistanceMatrix& dist);

struct KSweepResult {
  std::map<std::size_t, double> curve;
  // Attains the maximum of curve; ties go to the smaller k.
  std::size_t best_k = 0;
  double best_average = 0.0;
};

// Evaluates every cut k in [k_min, k_max]. Requires
// 2 <= k_min <= k_max <= n - 1 (Errc::k_out_of_range). Cuts are evaluated on
// up to `workers` threads; the result does not depend on the worker count.
KSweepResult sweep_k(const Dendrogram& dend, const DistanceMatrix& dist, std::size_t k_min, std::size_t k_max,
                     std::size_t workers = 1);

// Upper end of the default sweep: min(n - 1, 300).
std::size_t default_k_max(std::size_t n);

// "k,average" rows under a header, then a final "best_k,<k>" row.
void save_sweep(const std::filesystem::path& path, const KSweepResult& sweep);
KSweepResult load_sweep(const std::filesystem::path& path);

}  // namespace cdisc
