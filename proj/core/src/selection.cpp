#include "cdisc/selection.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <thread>

#include "cdisc/error.hpp"
#include "text_io.hpp"

namespace cdisc {

namespace {

void check_inputs(const ClusterAssignment& assignment, const DistanceMatrix& dist) {
  if (assignment.labels.size() != dist.n()) {
    throw Error(Errc::dimension_mismatch, "assignment covers " + std::to_string(assignment.labels.size()) +
                                              " items but the distance matrix has " + std::to_string(dist.n()));
  }
  if (assignment.k < 2) throw Error(Errc::single_cluster, "silhouette needs at least two clusters");
}

std::vector<std::size_t> cluster_sizes(const ClusterAssignment& assignment) {
  std::vector<std::size_t> sizes(assignment.k, 0);
  for (auto label : assignment.labels) ++sizes.at(label);
  return sizes;
}

double point_score(std::size_t i, const ClusterAssignment& assignment, const DistanceMatrix& dist,
                   const std::vector<std::size_t>& sizes, std::vector<double>& sums) {
  const std::size_t own = assignment.labels[i];
  if (sizes[own] <= 1) return 0.0;
  std::fill(sums.begin(), sums.end(), 0.0);
  const std::size_t n = dist.n();
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) sums[assignment.labels[j]] += dist.at(i, j);
  }
  const double a = sums[own] / static_cast<double>(sizes[own] - 1);
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < assignment.k; ++c) {
    if (c == own || sizes[c] == 0) continue;
    b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
  }
  const double denom = std::max(a, b);
  if (denom == 0.0) return 0.0;
  return (b - a) / denom;
}

}  // namespace

double silhouette_point(std::size_t i, const ClusterAssignment& assignment, const DistanceMatrix& dist) {
  check_inputs(assignment, dist);
  if (i >= dist.n()) throw Error(Errc::invalid_argument, "point index out of range");
  auto sizes = cluster_sizes(assignment);
  std::vector<double> sums(assignment.k);
  return point_score(i, assignment, dist, sizes, sums);
}

SilhouetteReport silhouette(const ClusterAssignment& assignment, const DistanceMatrix& dist) {
  check_inputs(assignment, dist);
  auto sizes = cluster_sizes(assignment);
  std::vector<double> sums(assignment.k);
  SilhouetteReport report;
  report.k = assignment.k;
  report.per_point.resize(dist.n());
  double total = 0.0;
  for (std::size_t i = 0; i < dist.n(); ++i) {
    report.per_point[i] = point_score(i, assignment, dist, sizes, sums);
    total += report.per_point[i];
  }
  report.average = total / static_cast<double>(dist.n());
  return report;
}

double average_silhouette(const ClusterAssignment& assignment, const DistanceMatrix& dist) {
  return silhouette(assignment, dist).average;
}

std::size_t default_k_max(std::size_t n) { return n < 2 ? 0 : std::min<std::size_t>(n - 1, 300); }

KSweepResult sweep_k(const Dendrogram& dend, const DistanceMatrix& dist, std::size_t k_min, std::size_t k_max,
                     std::size_t workers) {
  const std::size_t n = dend.leaves();
  if (dist.n() != n) throw Error(Errc::dimension_mismatch, "dendrogram and distance matrix differ in size");
  if (k_min < 2 || k_min > k_max || k_max + 1 > n) {
    throw Error(Errc::k_out_of_range, "sweep range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                                          "] must satisfy 2 <= k_min <= k_max <= n-1 (n=" + std::to_string(n) + ")");
  }
  const std::size_t count = k_max - k_min + 1;
  std::vector<double> averages(count);
  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) averages[t] = average_silhouette(cut(dend, k_min + t), dist);
  };
  workers = std::clamp<std::size_t>(workers, 1, count);
  if (workers == 1) {
    evaluate(0, count);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back(evaluate, count * w / workers, count * (w + 1) / workers);
    }
  }
  KSweepResult result;
  for (std::size_t t = 0; t < count; ++t) {
    result.curve[k_min + t] = averages[t];
    if (t == 0 || averages[t] > result.best_average) {
      result.best_average = averages[t];
      result.best_k = k_min + t;
    }
  }
  return result;
}

void save_sweep(const std::filesystem::path& path, const KSweepResult& sweep) {
  std::string out = "k,average_silhouette\n";
  char buf[64];
  for (const auto& [k, avg] : sweep.curve) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, avg);
    out += buf;
  }
  out += "best_k," + std::to_string(sweep.best_k) + "\n";
  detail::write_file(path, out);
}

KSweepResult load_sweep(const std::filesystem::path& path) {
  KSweepResult sweep;
  auto text = detail::read_file(path);
  bool header = true;
  for (auto line : detail::split_lines(text)) {
    if (detail::trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string_view::npos) throw Error(Errc::parse, "sweep row without ','");
    auto key = line.substr(0, comma);
    auto value = line.substr(comma + 1);
    if (key == "best_k") {
      sweep.best_k = detail::parse_size(value);
    } else {
      sweep.curve[detail::parse_size(key)] = detail::parse_double(value);
    }
  }
  if (auto it = sweep.curve.find(sweep.best_k); it != sweep.curve.end()) sweep.best_average = it->second;
  return sweep;
}

}  // namespace cdisc
