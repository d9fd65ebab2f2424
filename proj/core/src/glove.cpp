#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "cdisc/embedding.hpp"
#include "cdisc/error.hpp"
#include "rng.hpp"

namespace cdisc {

double CooccurrenceTable::get(std::uint32_t row, std::uint32_t col) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{row, col},
                             [](const Entry& e, const std::pair<std::uint32_t, std::uint32_t>& key) {
                               return e.row != key.first ? e.row < key.first : e.col < key.second;
                             });
  if (it != entries.end() && it->row == row && it->col == col) return it->value;
  return 0.0;
}

CooccurrenceTable build_cooccurrence(const TokenStream& corpus, const std::vector<std::string>& vocab,
                                     std::size_t window, bool symmetric, CooccurrenceWeighting weighting) {
  if (window == 0) throw Error(Errc::invalid_argument, "window must be >= 1");
  std::unordered_map<std::string_view, std::uint32_t> ids;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (!ids.emplace(vocab[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(Errc::duplicate_token, "duplicate vocabulary token '" + vocab[i] + "'");
    }
  }
  std::unordered_map<std::uint64_t, double> counts;
  auto add = [&](std::uint32_t row, std::uint32_t col, double w) {
    counts[(static_cast<std::uint64_t>(row) << 32) | col] += w;
  };
  std::vector<std::uint32_t> encoded;
  for (const auto& sentence : corpus) {
    encoded.clear();
    for (const auto& tok : sentence) {
      if (auto it = ids.find(tok); it != ids.end()) encoded.push_back(it->second);
    }
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      std::size_t lo = i >= window ? i - window : 0;
      for (std::size_t j = lo; j < i; ++j) {
        const double w = weighting == CooccurrenceWeighting::harmonic ? 1.0 / static_cast<double>(i - j) : 1.0;
        add(encoded[i], encoded[j], w);
        if (symmetric) add(encoded[j], encoded[i], w);
      }
    }
  }
  CooccurrenceTable table;
  table.vocab = vocab;
  table.symmetric = symmetric;
  table.entries.reserve(counts.size());
  for (const auto& [key, value] : counts) {
    table.entries.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffu), value});
  }
  std::sort(table.entries.begin(), table.entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return table;
}

namespace objective {

double glove_weight(double x, double x_max, double power) {
  if (x <= 0.0) return 0.0;
  if (x >= x_max) return 1.0;
  return std::pow(x / x_max, power);
}

double glove_pair(std::span<const double> word, std::span<const double> context, double bias_word,
                  double bias_context, double x, double x_max, double power, std::span<double> grad_word,
                  std::span<double> grad_context, GloveGrad& grad_bias) {
  double dot = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) dot += word[i] * context[i];
  const double diff = dot + bias_word + bias_context - std::log(x);
  const double f = glove_weight(x, x_max, power);
  const double fdiff = f * diff;
  for (std::size_t i = 0; i < word.size(); ++i) {
    grad_word[i] = fdiff * context[i];
    grad_context[i] = fdiff * word[i];
  }
  grad_bias.bias_word = fdiff;
  grad_bias.bias_context = fdiff;
  return 0.5 * fdiff * diff;
}

}  // namespace objective

namespace {

struct GloveParams {
  std::size_t dim;
  std::vector<double> word, context, bias_word, bias_context;
  std::vector<double> sq_word, sq_context, sq_bias_word, sq_bias_context;
};

double run_glove_chunk(GloveParams& p, const CooccurrenceTable& cooc, const std::vector<std::size_t>& order,
                       std::size_t begin, std::size_t end, const TrainConfig& cfg) {
  const std::size_t d = p.dim;
  std::vector<double> g_word(d), g_context(d);
  objective::GloveGrad g_bias;
  double loss = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const auto& e = cooc.entries[order[k]];
    double* w = p.word.data() + e.row * d;
    double* c = p.context.data() + e.col * d;
    double pair_loss = objective::glove_pair(std::span<const double>(w, d), std::span<const double>(c, d),
                                             p.bias_word[e.row], p.bias_context[e.col], e.value, cfg.x_max,
                                             cfg.weight_power, g_word, g_context, g_bias);
    if (!std::isfinite(pair_loss)) continue;
    loss += pair_loss;
    double* sw = p.sq_word.data() + e.row * d;
    double* sc = p.sq_context.data() + e.col * d;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] -= cfg.learning_rate * g_word[i] / std::sqrt(sw[i]);
      c[i] -= cfg.learning_rate * g_context[i] / std::sqrt(sc[i]);
      sw[i] += g_word[i] * g_word[i];
      sc[i] += g_context[i] * g_context[i];
    }
    p.bias_word[e.row] -= cfg.learning_rate * g_bias.bias_word / std::sqrt(p.sq_bias_word[e.row]);
    p.bias_context[e.col] -= cfg.learning_rate * g_bias.bias_context / std::sqrt(p.sq_bias_context[e.col]);
    p.sq_bias_word[e.row] += g_bias.bias_word * g_bias.bias_word;
    p.sq_bias_context[e.col] += g_bias.bias_context * g_bias.bias_context;
  }
  return loss;
}

}  // namespace

EmbeddingMatrix train_glove(const CooccurrenceTable& cooc, const TrainConfig& cfg, TrainingReport* report) {
  if (cooc.empty() || cooc.vocab.empty()) throw Error(Errc::empty_input, "co-occurrence table is empty");
  if (cfg.dim == 0 || cfg.epochs == 0 || cfg.workers == 0) {
    throw Error(Errc::invalid_argument, "dim, epochs and workers must be >= 1");
  }
  if (!(cfg.x_max > 0.0) || !(cfg.learning_rate > 0.0)) {
    throw Error(Errc::invalid_argument, "x_max and learning_rate must be > 0");
  }
  const std::size_t n = cooc.vocab.size();
  const std::size_t d = cfg.dim;
  GloveParams p{d, std::vector<double>(n * d), std::vector<double>(n * d), std::vector<double>(n),
                std::vector<double>(n), std::vector<double>(n * d, 1.0), std::vector<double>(n * d, 1.0),
                std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
  detail::Rng rng(detail::derive_seed(cfg.seed, 0));
  auto init = [&](std::vector<double>& v) {
    for (double& x : v) x = (detail::uniform01(rng) - 0.5) / static_cast<double>(d);
  };
  init(p.word);
  init(p.context);
  init(p.bias_word);
  init(p.bias_context);

  std::vector<std::size_t> order(cooc.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> epoch_loss;
  const std::size_t workers = std::min(cfg.workers, order.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    detail::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    if (workers == 1) {
      loss = run_glove_chunk(p, cooc, order, 0, order.size(), cfg);
    } else {
      std::mutex m;
      std::vector<std::jthread> threads;
      for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = order.size() * w / workers;
        std::size_t end = order.size() * (w + 1) / workers;
        threads.emplace_back([&, begin, end] {
          double part = run_glove_chunk(p, cooc, order, begin, end, cfg);
          std::lock_guard lock(m);
          loss += part;
        });
      }
    }
    epoch_loss.push_back(loss);
  }

  std::vector<double> combined(n * d);
  for (std::size_t i = 0; i < n * d; ++i) combined[i] = p.word[i] + p.context[i];
  if (report) {
    report->epoch_loss = std::move(epoch_loss);
    report->vocab_size = n;
  }
  return EmbeddingMatrix(cooc.vocab, d, std::move(combined));
}

}  // namespace cdisc
