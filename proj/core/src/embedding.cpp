#include <algorithm>
#include <cmath>

#include "cdisc/embedding_matrix.hpp"
#include "cdisc/error.hpp"

namespace cdisc {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> vocab, std::size_t dim)
    : EmbeddingMatrix(std::move(vocab), dim, {}) {}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> vocab, std::size_t dim,
                                 std::vector<double> values)
    : vocab_(std::move(vocab)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw Error(Errc::invalid_argument, "embedding dimension must be >= 1");
  if (values_.empty()) values_.assign(vocab_.size() * dim_, 0.0);
  if (values_.size() != vocab_.size() * dim_) {
    throw Error(Errc::dimension_mismatch, "embedding values do not match vocab_size x dim");
  }
  build_index();
}

void EmbeddingMatrix::build_index() {
  index_.clear();
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], i).second) {
      throw Error(Errc::duplicate_token, "duplicate token '" + vocab_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingMatrix::at(std::string_view token) const {
  auto idx = index_of(token);
  if (!idx) throw Error(Errc::unknown_token, "token not in embedding vocabulary: '" + std::string(token) + "'");
  return row(*idx);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(Errc::dimension_mismatch, "cosine of vectors with different lengths");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::zero_vector, "cosine similarity of a zero vector");
  // Equal norms divide exactly, so identical vectors score exactly 1.
  const double denom = nu == nv ? nu : std::sqrt(nu * nv);
  return std::clamp(dot / denom, -1.0, 1.0);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return std::clamp(1.0 - cosine_similarity(u, v), 0.0, 2.0);
}

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(Errc::dimension_mismatch, "distance of vectors with different lengths");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = u[i] - v[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace cdisc
