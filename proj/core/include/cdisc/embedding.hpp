#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdisc/embedding_matrix.hpp"
#include "cdisc/preprocess.hpp"
#include "cdisc/vocab.hpp"

namespace cdisc {

enum class Architecture { skipgram, cbow, glove };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

struct TrainConfig {
  Architecture arch = Architecture::skipgram;
  std::size_t dim = 300;
  std::size_t window = 5;
  std::uint64_t min_count = 5;
  std::size_t negative = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  // word2vec frequent-word subsampling threshold; 0 disables it.
  double subsample = 0.0;
  // word2vec draws the effective window uniformly from [1, window] per center.
  bool shrink_window = true;
  bool symmetric_context = true;
  double x_max = 100.0;
  double weight_power = 0.75;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // Reference defaults per architecture: skip-gram lr 0.025, CBOW lr 0.05,
  // GloVe window 10, 15 iterations, lr 0.05.
  static TrainConfig defaults(Architecture arch);
};

struct VocabEntry {
  std::string token;
  std::uint64_t count = 0;
};
using Vocabulary = std::vector<VocabEntry>;

// Tokens with count >= min_count ordered by count descending, then token.
// Throws Errc::empty_vocab when nothing survives.
Vocabulary build_vocab(const FrequencyTable& freq, std::uint64_t min_count);

struct TrainingReport {
  // Summed objective observed during each pass over the data.
  std::vector<double> epoch_loss;
  std::size_t vocab_size = 0;
};

// Skip-gram / CBOW with negative sampling. With workers == 1 the result is
// bit-reproducible for a fixed seed; more workers update shared parameters
// without synchronisation.
EmbeddingMatrix train_word2vec(const TokenStream& corpus, const TrainConfig& cfg, TrainingReport* report = nullptr);
EmbeddingMatrix train_skipgram(const TokenStream& corpus, TrainConfig cfg, TrainingReport* report = nullptr);
EmbeddingMatrix train_cbow(const TokenStream& corpus, TrainConfig cfg, TrainingReport* report = nullptr);

enum class CooccurrenceWeighting { harmonic, unit };

// Sparse co-occurrence counts over a fixed vocabulary. Entries are sorted by
// (row, col). row is the center word, col the context word.
struct CooccurrenceTable {
  struct Entry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double value = 0.0;
  };
  std::vector<std::string> vocab;
  std::vector<Entry> entries;
  bool symmetric = true;

  double get(std::uint32_t row, std::uint32_t col) const;
  bool empty() const { return entries.empty(); }
};

// Context tokens within `window` positions of the center contribute
// 1/distance (harmonic) or 1 (unit). Symmetric mode counts both sides;
// asymmetric mode counts left context only. Tokens outside `vocab` are removed
// before windowing and windows never cross sentence boundaries.
CooccurrenceTable build_cooccurrence(const TokenStream& corpus, const std::vector<std::string>& vocab,
                                     std::size_t window, bool symmetric,
                                     CooccurrenceWeighting weighting = CooccurrenceWeighting::harmonic);

// Weighted least squares on log counts with AdaGrad. Returns word + context
// vectors. Throws Errc::empty_input for an empty table.
EmbeddingMatrix train_glove(const CooccurrenceTable& cooc, const TrainConfig& cfg, TrainingReport* report = nullptr);

// Dispatches on cfg.arch; builds vocabulary and co-occurrences as needed.
EmbeddingMatrix train_embeddings(const TokenStream& corpus, const TrainConfig& cfg, TrainingReport* report = nullptr);

// Per-example objectives. Each returns the loss and writes the analytic
// gradient into the grad_* outputs (overwritten, not accumulated). Shared by
// the trainers and by the gradient checks.
namespace objective {

// -log s(out_0 . h) - sum_{k>0} log s(-out_k . h), where `outputs` holds
// one positive row followed by the negative rows, each of length h.size().
double negative_sampling(std::span<const double> hidden, std::span<const double> outputs,
                         std::span<double> grad_hidden, std::span<double> grad_outputs);

// Skip-gram pair: hidden is the center word's input vector.
inline double skipgram_pair(std::span<const double> center, std::span<const double> outputs,
                            std::span<double> grad_center, std::span<double> grad_outputs) {
  return negative_sampling(center, outputs, grad_center, grad_outputs);
}

// CBOW: hidden is the mean of the context input vectors (rows of `contexts`).
double cbow(std::span<const double> contexts, std::size_t dim, std::span<const double> outputs,
            std::span<double> grad_contexts, std::span<double> grad_outputs);

double glove_weight(double x, double x_max, double power);

struct GloveGrad {
  double bias_word = 0.0;
  double bias_context = 0.0;
};

// 0.5 * f(x) * (w.c + b_w + b_c - log x)^2
double glove_pair(std::span<const double> word, std::span<const double> context, double bias_word,
                  double bias_context, double x, double x_max, double power, std::span<double> grad_word,
                  std::span<double> grad_context, GloveGrad& grad_bias);

}  // namespace objective

}  // namespace cdisc
