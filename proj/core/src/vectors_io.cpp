#include <charconv>

#include "cdisc/embedding_matrix.hpp"
#include "cdisc/error.hpp"
#include "text_io.hpp"

namespace cdisc {

namespace {

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::malformed_header, "vector file header: bad count '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_vectors(const EmbeddingMatrix& emb) {
  std::string out = std::to_string(emb.size()) + " " + std::to_string(emb.dim()) + "\n";
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out += emb.token(i);
    for (double v : emb.row(i)) {
      out.push_back(' ');
      out += detail::format_g9(v);
    }
    out.push_back('\n');
  }
  return out;
}

EmbeddingMatrix parse_vectors(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error(Errc::malformed_header, "vector file is empty");
  auto header = detail::split_whitespace(lines[0]);
  if (header.size() != 2) throw Error(Errc::malformed_header, "vector file header must be '<vocab_size> <dim>'");
  const std::size_t rows = parse_count(header[0]);
  const std::size_t dim = parse_count(header[1]);
  if (dim == 0) throw Error(Errc::malformed_header, "vector file header: dim must be >= 1");

  std::vector<std::string> vocab;
  std::vector<double> values;
  vocab.reserve(rows);
  values.reserve(rows * dim);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    auto parts = detail::split_whitespace(lines[ln]);
    if (parts.empty()) continue;
    if (parts.size() - 1 != dim) {
      throw Error(Errc::dimension_mismatch, "vector file line " + std::to_string(ln + 1) + ": expected " +
                                                std::to_string(dim) + " values, found " +
                                                std::to_string(parts.size() - 1));
    }
    vocab.emplace_back(parts[0]);
    for (std::size_t k = 1; k < parts.size(); ++k) values.push_back(detail::parse_double(parts[k]));
  }
  if (vocab.size() != rows) {
    throw Error(Errc::malformed_header, "vector file header declares " + std::to_string(rows) +
                                            " rows but " + std::to_string(vocab.size()) + " were found");
  }
  return EmbeddingMatrix(std::move(vocab), dim, std::move(values));
}

void save_vectors(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  detail::write_file(path, format_vectors(emb));
}

EmbeddingMatrix load_vectors(const std::filesystem::path& path) { return parse_vectors(detail::read_file(path)); }

}  // namespace cdisc
