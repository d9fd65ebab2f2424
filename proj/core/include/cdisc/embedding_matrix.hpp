#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cdisc {

// Row-major token -> vector table. Tokens are unique and every row has
// exactly dim() entries.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> vocab, std::size_t dim);
  EmbeddingMatrix(std::vector<std::string> vocab, std::size_t dim, std::vector<double> values);

  std::size_t size() const { return vocab_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(std::size_t row) const { return vocab_[row]; }

  std::optional<std::size_t> index_of(std::string_view token) const;
  bool contains(std::string_view token) const { return index_of(token).has_value(); }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }

  // Throws Errc::unknown_token.
  std::span<const double> at(std::string_view token) const;

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  void build_index();

  std::vector<std::string> vocab_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// u.v / (|u||v|). Throws Errc::zero_vector for a zero-norm argument and
// Errc::dimension_mismatch when lengths differ.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// 1 - cosine_similarity, clamped to [0, 2].
double cosine_distance(std::span<const double> u, std::span<const double> v);

double euclidean_distance(std::span<const double> u, std::span<const double> v);

// Word2vec text format: "<vocab_size> <dim>" header, then "<token> v1 .. vd"
// per row; values written with 9 significant digits.
std::string format_vectors(const EmbeddingMatrix& emb);
EmbeddingMatrix parse_vectors(std::string_view text);

void save_vectors(const std::filesystem::path& path, const EmbeddingMatrix& emb);
EmbeddingMatrix load_vectors(const std::filesystem::path& path);

}  // namespace cdisc
