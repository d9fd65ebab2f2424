#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "cdisc/clustering.hpp"
#include "cdisc/error.hpp"

namespace cdisc {

Dendrogram::Dendrogram(std::size_t leaves, std::vector<Merge> merges) : leaves_(leaves), merges_(std::move(merges)) {
  if (leaves_ == 0) throw Error(Errc::parse, "dendrogram needs at least one leaf");
  if (merges_.size() != leaves_ - 1) {
    throw Error(Errc::parse, "dendrogram over " + std::to_string(leaves_) + " leaves needs " +
                                 std::to_string(leaves_ - 1) + " merges, got " + std::to_string(merges_.size()));
  }
  std::vector<std::size_t> sizes(2 * leaves_ - 1, 1);
  std::vector<bool> used(2 * leaves_ - 1, false);
  for (std::size_t m = 0; m < merges_.size(); ++m) {
    const auto& mg = merges_[m];
    const std::size_t limit = leaves_ + m;
    if (mg.left >= limit || mg.right >= limit || mg.left == mg.right) {
      throw Error(Errc::parse, "merge " + std::to_string(m) + " references an invalid node");
    }
    if (used[mg.left] || used[mg.right]) {
      throw Error(Errc::parse, "merge " + std::to_string(m) + " reuses a consumed node");
    }
    if (!std::isfinite(mg.height)) throw Error(Errc::parse, "merge " + std::to_string(m) + " has non-finite height");
    if (mg.size != sizes[mg.left] + sizes[mg.right]) {
      throw Error(Errc::parse, "merge " + std::to_string(m) + " size does not match its children");
    }
    used[mg.left] = used[mg.right] = true;
    sizes[limit] = mg.size;
  }
}

std::vector<std::size_t> Dendrogram::members(std::size_t node) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (v < leaves_) {
      out.push_back(v);
    } else {
      const auto& mg = merges_[v - leaves_];
      stack.push_back(mg.left);
      stack.push_back(mg.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct PairKey {
  double distance;
  std::size_t lo;
  std::size_t hi;

  bool operator<(const PairKey& o) const { return std::tie(distance, lo, hi) < std::tie(o.distance, o.lo, o.hi); }
};

double lance_williams(Linkage linkage, double d_ak, double d_bk, std::size_t size_a, std::size_t size_b) {
  switch (linkage) {
    case Linkage::single: return std::min(d_ak, d_bk);
    case Linkage::complete: return std::max(d_ak, d_bk);
    case Linkage::average:
      return (static_cast<double>(size_a) * d_ak + static_cast<double>(size_b) * d_bk) /
             static_cast<double>(size_a + size_b);
  }
  return 0.0;
}

}  // namespace

Dendrogram agglomerate(const DistanceMatrix& dist, Linkage linkage) {
  const std::size_t n = dist.n();
  if (n < 2) throw Error(Errc::too_few_items, "agglomerate needs at least two items");

  // Clusters live in slots 0..n-1; a merge reuses the slot of its first child.
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = dist.at(i, j);
  }
  std::vector<std::size_t> node(n), size(n, 1), min_leaf(n);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) node[i] = min_leaf[i] = i;

  auto key = [&](std::size_t a, std::size_t b) {
    return PairKey{d[a * n + b], std::min(node[a], node[b]), std::max(node[a], node[b])};
  };
  std::vector<std::size_t> nn(n, 0);
  auto refresh = [&](std::size_t a) {
    bool found = false;
    PairKey best{};
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || !active[b]) continue;
      PairKey k = key(a, b);
      if (!found || k < best) {
        best = k;
        nn[a] = b;
        found = true;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::vector<Merge> merges;
  merges.reserve(n - 1);
  for (std::size_t m = 0; m + 1 < n; ++m) {
    std::size_t a = n;
    PairKey best{};
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      PairKey k = key(i, nn[i]);
      if (a == n || k < best) {
        best = k;
        a = i;
      }
    }
    std::size_t b = nn[a];
    if (min_leaf[b] < min_leaf[a]) std::swap(a, b);
    merges.push_back({node[a], node[b], best.distance, size[a] + size[b]});

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      double v = lance_williams(linkage, d[a * n + k], d[b * n + k], size[a], size[b]);
      d[a * n + k] = d[k * n + a] = v;
    }
    active[b] = false;
    size[a] += size[b];
    node[a] = n + m;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else if (key(k, a) < key(k, nn[k])) {
        nn[k] = a;
      }
    }
    refresh(a);
  }
  return Dendrogram(n, std::move(merges));
}

std::vector<std::vector<std::size_t>> ClusterAssignment::clusters() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

ClusterAssignment cut(const Dendrogram& dend, std::size_t k) {
  const std::size_t n = dend.leaves();
  if (k < 1 || k > n) {
    throw Error(Errc::k_out_of_range, "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<std::size_t> parent(2 * n - 1);
  for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = v;
  const auto& merges = dend.merges();
  for (std::size_t m = 0; m < n - k; ++m) {
    parent[merges[m].left] = n + m;
    parent[merges[m].right] = n + m;
  }
  auto root_of = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  ClusterAssignment out;
  out.k = k;
  out.labels.resize(n);
  std::vector<std::size_t> label_of(2 * n - 1, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = root_of(i);
    if (label_of[r] == std::numeric_limits<std::size_t>::max()) label_of[r] = next++;
    out.labels[i] = label_of[r];
  }
  return out;
}

}  // namespace cdisc
