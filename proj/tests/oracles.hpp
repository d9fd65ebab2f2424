#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They recompute everything from definitions and share no code with
// the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Full symmetric matrix from a condensed upper triangle.
inline std::vector<std::vector<double>> square(std::size_t n, const std::vector<double>& condensed) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = condensed[k++];
  return d;
}

struct NaiveMerge {
  std::size_t left, right;
  double height;
  std::size_t size;
};

enum class Link { single, complete, average };

// Recomputes every inter-cluster distance from the member lists at each
// step. Ties: smallest (min node id, max node id). left = child whose
// smallest leaf is smaller.
inline std::vector<NaiveMerge> naive_linkage(const std::vector<std::vector<double>>& d, Link link) {
  const std::size_t n = d.size();
  std::map<std::size_t, std::vector<std::size_t>> active;
  for (std::size_t i = 0; i < n; ++i) active[i] = {i};
  std::vector<NaiveMerge> out;
  std::size_t next = n;
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (auto a = active.begin(); a != active.end(); ++a) {
      for (auto b = std::next(a); b != active.end(); ++b) {
        double agg = link == Link::single ? std::numeric_limits<double>::infinity()
                     : link == Link::complete ? -1.0 : 0.0;
        for (auto i : a->second)
          for (auto j : b->second) {
            if (link == Link::single) agg = std::min(agg, d[i][j]);
            else if (link == Link::complete) agg = std::max(agg, d[i][j]);
            else agg += d[i][j];
          }
        if (link == Link::average) agg /= static_cast<double>(a->second.size() * b->second.size());
        // Map iteration visits pairs in (min id, max id) order, so strict < keeps the first.
        if (agg < best) {
          best = agg;
          ba = a->first;
          bb = b->first;
        }
      }
    }
    auto ma = active[ba], mb = active[bb];
    const bool a_first = *std::min_element(ma.begin(), ma.end()) < *std::min_element(mb.begin(), mb.end());
    out.push_back({a_first ? ba : bb, a_first ? bb : ba, best, ma.size() + mb.size()});
    ma.insert(ma.end(), mb.begin(), mb.end());
    active.erase(ba);
    active.erase(bb);
    active[next++] = ma;
  }
  return out;
}

// Height of the lowest merge joining i and j, from the merge list.
inline std::vector<std::vector<double>> naive_cophenetic(std::size_t n, const std::vector<NaiveMerge>& merges) {
  std::vector<std::set<std::size_t>> members(n + merges.size());
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  for (std::size_t m = 0; m < merges.size(); ++m) {
    const auto& L = members[merges[m].left];
    const auto& R = members[merges[m].right];
    for (auto i : L)
      for (auto j : R) t[i][j] = t[j][i] = merges[m].height;
    members[n + m] = L;
    members[n + m].insert(R.begin(), R.end());
  }
  return t;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// s(i) straight from the definitions; singletons score 0.
inline double silhouette(std::size_t i, const std::vector<std::size_t>& labels,
                         const std::vector<std::vector<double>>& d) {
  std::map<std::size_t, std::pair<double, std::size_t>> per_cluster;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j == i) continue;
    auto& e = per_cluster[labels[j]];
    e.first += d[i][j];
    e.second += 1;
  }
  const auto own = per_cluster.find(labels[i]);
  if (own == per_cluster.end()) return 0.0;
  const double a = own->second.first / static_cast<double>(own->second.second);
  double b = std::numeric_limits<double>::infinity();
  for (const auto& [c, e] : per_cluster) {
    if (c != labels[i]) b = std::min(b, e.first / static_cast<double>(e.second));
  }
  const double m = std::max(a, b);
  return m == 0.0 ? 0.0 : (b - a) / m;
}

struct Metrics {
  double accuracy, precision, recall, f1;
};

// Macro averages over labels appearing in truth or predictions.
inline Metrics from_predictions(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred,
                                std::size_t labels) {
  std::vector<std::vector<double>> cm(labels, std::vector<double>(labels, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) cm[truth[i]][pred[i]] += 1;
  double trace = 0, total = 0;
  for (std::size_t a = 0; a < labels; ++a)
    for (std::size_t b = 0; b < labels; ++b) {
      total += cm[a][b];
      if (a == b) trace += cm[a][b];
    }
  Metrics m{trace / total, 0, 0, 0};
  double present = 0;
  for (std::size_t c = 0; c < labels; ++c) {
    double tp = cm[c][c], fp = 0, fn = 0;
    for (std::size_t o = 0; o < labels; ++o) {
      if (o == c) continue;
      fp += cm[o][c];
      fn += cm[c][o];
    }
    if (tp + fp + fn == 0) continue;
    present += 1;
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.precision += p;
    m.recall += r;
    m.f1 += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  m.precision /= present;
  m.recall /= present;
  m.f1 /= present;
  return m;
}

inline double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::map<std::pair<std::size_t, std::size_t>, double> nij;
  std::map<std::size_t, double> ai, bj;
  for (std::size_t i = 0; i < a.size(); ++i) {
    nij[{a[i], b[i]}] += 1;
    ai[a[i]] += 1;
    bj[b[i]] += 1;
  }
  auto c2 = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sa = 0, sb = 0;
  for (const auto& [k, v] : nij) index += c2(v);
  for (const auto& [k, v] : ai) sa += c2(v);
  for (const auto& [k, v] : bj) sb += c2(v);
  const double expected = sa * sb / c2(static_cast<double>(a.size()));
  const double max_index = (sa + sb) / 2;
  return (index - expected) / (max_index - expected);
}

// Central differences of f at x, one coordinate at a time.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double up = f(x);
    x[i] = orig - h;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

// |a - b| / max(|a|, |b|) over whole vectors; 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::max(std::sqrt(na), std::sqrt(nb));
  return scale == 0 ? 0.0 : std::sqrt(diff) / scale;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

}  // namespace oracle
