#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "cdisc/embedding.hpp"
#include "cdisc/error.hpp"
#include "rng.hpp"

namespace cdisc {

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::skipgram: return "skipgram";
    case Architecture::cbow: return "cbow";
    case Architecture::glove: return "glove";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "skipgram" || name == "skip-gram" || name == "sg") return Architecture::skipgram;
  if (name == "cbow") return Architecture::cbow;
  if (name == "glove") return Architecture::glove;
  throw Error(Errc::invalid_argument, "unknown architecture '" + std::string(name) + "'");
}

TrainConfig TrainConfig::defaults(Architecture arch) {
  TrainConfig cfg;
  cfg.arch = arch;
  switch (arch) {
    case Architecture::skipgram:
      cfg.learning_rate = 0.025;
      break;
    case Architecture::cbow:
      cfg.learning_rate = 0.05;
      break;
    case Architecture::glove:
      cfg.window = 10;
      cfg.epochs = 15;
      cfg.learning_rate = 0.05;
      break;
  }
  return cfg;
}

Vocabulary build_vocab(const FrequencyTable& freq, std::uint64_t min_count) {
  if (min_count == 0) throw Error(Errc::invalid_argument, "min_count must be >= 1");
  Vocabulary vocab;
  for (const auto& [token, count] : freq.entries()) {
    if (count >= min_count) vocab.push_back({token, count});
  }
  if (vocab.empty()) throw Error(Errc::empty_vocab, "no token reaches min_count " + std::to_string(min_count));
  std::stable_sort(vocab.begin(), vocab.end(), [](const VocabEntry& a, const VocabEntry& b) {
    return a.count != b.count ? a.count > b.count : a.token < b.token;
  });
  return vocab;
}

namespace objective {

namespace {

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double negative_sampling(std::span<const double> hidden, std::span<const double> outputs,
                         std::span<double> grad_hidden, std::span<double> grad_outputs) {
  const std::size_t d = hidden.size();
  const std::size_t rows = d == 0 ? 0 : outputs.size() / d;
  std::fill(grad_hidden.begin(), grad_hidden.end(), 0.0);
  double loss = 0.0;
  for (std::size_t k = 0; k < rows; ++k) {
    auto out = outputs.subspan(k * d, d);
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += out[i] * hidden[i];
    // label 1 for the positive row, 0 for negatives.
    double coeff;
    if (k == 0) {
      loss -= log_sigmoid(dot);
      coeff = sigmoid(dot) - 1.0;
    } else {
      loss -= log_sigmoid(-dot);
      coeff = sigmoid(dot);
    }
    auto g_out = grad_outputs.subspan(k * d, d);
    for (std::size_t i = 0; i < d; ++i) {
      grad_hidden[i] += coeff * out[i];
      g_out[i] = coeff * hidden[i];
    }
  }
  return loss;
}

double cbow(std::span<const double> contexts, std::size_t dim, std::span<const double> outputs,
            std::span<double> grad_contexts, std::span<double> grad_outputs) {
  const std::size_t count = contexts.size() / dim;
  std::vector<double> hidden(dim, 0.0), grad_hidden(dim, 0.0);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < dim; ++i) hidden[i] += contexts[c * dim + i];
  }
  for (double& h : hidden) h /= static_cast<double>(count);
  double loss = negative_sampling(hidden, outputs, grad_hidden, grad_outputs);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < dim; ++i) grad_contexts[c * dim + i] = grad_hidden[i] / static_cast<double>(count);
  }
  return loss;
}

}  // namespace objective

namespace {

void validate(const TrainConfig& cfg) {
  if (cfg.dim == 0) throw Error(Errc::invalid_argument, "dim must be >= 1");
  if (cfg.window == 0) throw Error(Errc::invalid_argument, "window must be >= 1");
  if (cfg.min_count == 0) throw Error(Errc::invalid_argument, "min_count must be >= 1");
  if (cfg.epochs == 0) throw Error(Errc::invalid_argument, "epochs must be >= 1");
  if (cfg.workers == 0) throw Error(Errc::invalid_argument, "workers must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw Error(Errc::invalid_argument, "learning_rate must be > 0");
}

class NoiseTable {
 public:
  explicit NoiseTable(const Vocabulary& vocab, double power = 0.75) {
    const std::size_t size = std::max<std::size_t>(1'000'000, vocab.size() * 100);
    table_.resize(size);
    double norm = 0.0;
    for (const auto& e : vocab) norm += std::pow(static_cast<double>(e.count), power);
    std::size_t word = 0;
    double cumulative = std::pow(static_cast<double>(vocab[0].count), power) / norm;
    for (std::size_t a = 0; a < size; ++a) {
      table_[a] = static_cast<std::uint32_t>(word);
      if (static_cast<double>(a) / static_cast<double>(size) > cumulative && word + 1 < vocab.size()) {
        ++word;
        cumulative += std::pow(static_cast<double>(vocab[word].count), power) / norm;
      }
    }
  }

  std::uint32_t sample(detail::Rng& rng) const { return table_[detail::uniform_index(rng, table_.size())]; }

 private:
  std::vector<std::uint32_t> table_;
};

struct Word2VecState {
  const TrainConfig& cfg;
  const Vocabulary& vocab;
  const std::vector<std::vector<std::uint32_t>>& sentences;
  const NoiseTable& noise;
  std::vector<double>& input;
  std::vector<double>& output;
  std::uint64_t total_words;
  std::uint64_t corpus_words;
  std::atomic<std::uint64_t>& processed;
  std::vector<double>& epoch_loss;
  std::mutex& loss_mutex;
};

void run_worker(Word2VecState& s, std::size_t begin, std::size_t end, std::uint64_t seed) {
  const std::size_t d = s.cfg.dim;
  const bool cbow = s.cfg.arch == Architecture::cbow;
  detail::Rng rng(seed);
  std::vector<double> outputs, grad_outputs, contexts, grad_contexts, grad_hidden(d);
  std::vector<std::uint32_t> targets, window_ids, kept;

  const double sample_t = s.cfg.subsample * static_cast<double>(s.corpus_words);

  // Collects the positive target followed by negatives that differ from it.
  auto gather_outputs = [&](std::uint32_t positive) {
    targets.clear();
    targets.push_back(positive);
    for (std::size_t k = 0; k < s.cfg.negative; ++k) {
      std::uint32_t neg = s.noise.sample(rng);
      if (neg != positive) targets.push_back(neg);
    }
    outputs.resize(targets.size() * d);
    grad_outputs.resize(targets.size() * d);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      std::copy_n(s.output.begin() + static_cast<std::ptrdiff_t>(targets[k] * d), d,
                  outputs.begin() + static_cast<std::ptrdiff_t>(k * d));
    }
  };
  auto apply_outputs = [&](double lr) {
    for (std::size_t k = 0; k < targets.size(); ++k) {
      double* out = s.output.data() + targets[k] * d;
      const double* g = grad_outputs.data() + k * d;
      for (std::size_t i = 0; i < d; ++i) out[i] -= lr * g[i];
    }
  };

  for (std::size_t epoch = 0; epoch < s.cfg.epochs; ++epoch) {
    double loss = 0.0;
    for (std::size_t si = begin; si < end; ++si) {
      const auto& source = s.sentences[si];
      const std::vector<std::uint32_t>* sentence = &source;
      if (s.cfg.subsample > 0.0) {
        kept.clear();
        for (auto w : source) {
          double f = static_cast<double>(s.vocab[w].count);
          double keep = (std::sqrt(f / sample_t) + 1.0) * sample_t / f;
          if (keep >= detail::uniform01(rng)) kept.push_back(w);
        }
        sentence = &kept;
      }
      const auto& sent = *sentence;
      const std::size_t len = sent.size();
      for (std::size_t pos = 0; pos < len; ++pos) {
        std::uint64_t done = s.processed.fetch_add(1, std::memory_order_relaxed);
        double progress = static_cast<double>(done) / static_cast<double>(s.total_words + 1);
        double lr = s.cfg.learning_rate * std::max(1e-4, 1.0 - progress);

        std::size_t span = s.cfg.window;
        if (s.cfg.shrink_window) span = 1 + detail::uniform_index(rng, s.cfg.window);
        std::size_t lo = pos >= span ? pos - span : 0;
        std::size_t hi = std::min(len - 1, pos + span);
        window_ids.clear();
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c != pos) window_ids.push_back(sent[c]);
        }
        if (window_ids.empty()) continue;

        if (cbow) {
          contexts.resize(window_ids.size() * d);
          grad_contexts.resize(window_ids.size() * d);
          for (std::size_t c = 0; c < window_ids.size(); ++c) {
            std::copy_n(s.input.begin() + static_cast<std::ptrdiff_t>(window_ids[c] * d), d,
                        contexts.begin() + static_cast<std::ptrdiff_t>(c * d));
          }
          gather_outputs(sent[pos]);
          loss += objective::cbow(contexts, d, outputs, grad_contexts, grad_outputs);
          apply_outputs(lr);
          for (std::size_t c = 0; c < window_ids.size(); ++c) {
            double* in = s.input.data() + window_ids[c] * d;
            const double* g = grad_contexts.data() + c * d;
            for (std::size_t i = 0; i < d; ++i) in[i] -= lr * g[i];
          }
        } else {
          double* center = s.input.data() + sent[pos] * d;
          for (auto ctx : window_ids) {
            gather_outputs(ctx);
            loss += objective::skipgram_pair(std::span<const double>(center, d), outputs, grad_hidden,
                                             grad_outputs);
            apply_outputs(lr);
            for (std::size_t i = 0; i < d; ++i) center[i] -= lr * grad_hidden[i];
          }
        }
      }
    }
    std::lock_guard lock(s.loss_mutex);
    s.epoch_loss[epoch] += loss;
  }
}

}  // namespace

EmbeddingMatrix train_word2vec(const TokenStream& corpus, const TrainConfig& cfg, TrainingReport* report) {
  if (cfg.arch == Architecture::glove) throw Error(Errc::invalid_argument, "train_word2vec called with glove config");
  validate(cfg);
  const auto vocab = build_vocab(count_frequencies(corpus), cfg.min_count);
  std::unordered_map<std::string_view, std::uint32_t> ids;
  for (std::size_t i = 0; i < vocab.size(); ++i) ids.emplace(vocab[i].token, static_cast<std::uint32_t>(i));

  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t corpus_words = 0;
  for (const auto& sentence : corpus) {
    std::vector<std::uint32_t> encoded;
    for (const auto& tok : sentence) {
      if (auto it = ids.find(tok); it != ids.end()) encoded.push_back(it->second);
    }
    if (encoded.empty()) continue;
    corpus_words += encoded.size();
    sentences.push_back(std::move(encoded));
  }

  const std::size_t n = vocab.size();
  const std::size_t d = cfg.dim;
  std::vector<double> input(n * d), output(n * d, 0.0);
  detail::Rng init_rng(detail::derive_seed(cfg.seed, 0));
  for (double& v : input) v = (detail::uniform01(init_rng) - 0.5) / static_cast<double>(d);

  NoiseTable noise(vocab);
  std::atomic<std::uint64_t> processed{0};
  std::vector<double> epoch_loss(cfg.epochs, 0.0);
  std::mutex loss_mutex;
  Word2VecState state{cfg,   vocab, sentences, noise, input, output, corpus_words * cfg.epochs, corpus_words,
                      processed, epoch_loss, loss_mutex};

  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(1, sentences.size()));
  if (workers == 1) {
    run_worker(state, 0, sentences.size(), detail::derive_seed(cfg.seed, 1));
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t begin = sentences.size() * w / workers;
      std::size_t end = sentences.size() * (w + 1) / workers;
      threads.emplace_back([&state, begin, end, seed = detail::derive_seed(cfg.seed, w + 1)] {
        run_worker(state, begin, end, seed);
      });
    }
  }

  std::vector<std::string> tokens;
  tokens.reserve(n);
  for (const auto& e : vocab) tokens.push_back(e.token);
  if (report) {
    report->epoch_loss = epoch_loss;
    report->vocab_size = n;
  }
  return EmbeddingMatrix(std::move(tokens), d, std::move(input));
}

EmbeddingMatrix train_skipgram(const TokenStream& corpus, TrainConfig cfg, TrainingReport* report) {
  cfg.arch = Architecture::skipgram;
  return train_word2vec(corpus, cfg, report);
}

EmbeddingMatrix train_cbow(const TokenStream& corpus, TrainConfig cfg, TrainingReport* report) {
  cfg.arch = Architecture::cbow;
  return train_word2vec(corpus, cfg, report);
}

EmbeddingMatrix train_embeddings(const TokenStream& corpus, const TrainConfig& cfg, TrainingReport* report) {
  if (cfg.arch != Architecture::glove) return train_word2vec(corpus, cfg, report);
  validate(cfg);
  const auto vocab = build_vocab(count_frequencies(corpus), cfg.min_count);
  std::vector<std::string> tokens;
  tokens.reserve(vocab.size());
  for (const auto& e : vocab) tokens.push_back(e.token);
  auto cooc = build_cooccurrence(corpus, tokens, cfg.window, cfg.symmetric_context);
  return train_glove(cooc, cfg, report);
}

}  // namespace cdisc
