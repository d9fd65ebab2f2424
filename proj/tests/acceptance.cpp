// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "cdisc/classify.hpp"
#include "cdisc/clustering.hpp"
#include "cdisc/embedding.hpp"
#include "cdisc/error.hpp"
#include "cdisc/hierarchy.hpp"
#include "cdisc/pipeline.hpp"
#include "cdisc/selection.hpp"
#include "cdisc/synthetic.hpp"
#include "oracles.hpp"

using namespace cdisc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

// Runs a criterion body, turning an exception into a failure line.
void criterion(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, name, ok, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

DistanceMatrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim, Metric metric) {
  std::vector<std::string> names;
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("p" + std::to_string(i));
    auto v = oracle::random_vector(rng, dim);
    values.insert(values.end(), v.begin(), v.end());
  }
  return pairwise_distances(EmbeddingMatrix(names, dim, values), names, metric);
}

oracle::Link to_oracle(Linkage l) {
  return l == Linkage::single     ? oracle::Link::single
         : l == Linkage::complete ? oracle::Link::complete
                                  : oracle::Link::average;
}

// Shared by criteria 5 to 8.
struct FixtureRun {
  fs::path dir;
  PipelineConfig cfg;
  RunReport report;
  double seconds = 0;
  std::map<std::string, std::string> truth;
};

FixtureRun run_fixture(const fs::path& dir) {
  fs::remove_all(dir);
  FixtureRun r;
  r.dir = dir;
  const auto paths = write_fixture(dir);
  r.cfg = PipelineConfig::load(paths.config, std::nullopt, std::size_t{1});
  const auto t0 = Clock::now();
  r.report = run_all(r.cfg);
  r.seconds = seconds_since(t0);
  std::istringstream in(slurp(paths.truth));
  for (std::string line; std::getline(in, line);) {
    const auto tab = line.find('\t');
    if (tab != std::string::npos) r.truth[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return r;
}

}  // namespace

int main() {
  const auto scratch = fs::temp_directory_path() / "cdisc_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  criterion(1, "linkage matches naive reference", [] {
    std::mt19937_64 rng(2024);
    const auto t0 = Clock::now();
    std::size_t mismatches = 0, checked = 0;
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + trial % 7;
      const auto metric = trial % 2 ? Metric::cosine : Metric::euclidean;
      const auto d = random_points(rng, n, 3, metric);
      const auto full = oracle::square(n, d.values());
      for (auto link : {Linkage::single, Linkage::complete, Linkage::average}) {
        const auto got = agglomerate(d, link).merges();
        const auto want = oracle::naive_linkage(full, to_oracle(link));
        ++checked;
        bool same = got.size() == want.size();
        for (std::size_t m = 0; same && m < got.size(); ++m) {
          worst = std::max(worst, std::abs(got[m].height - want[m].height));
          same = got[m].left == want[m].left && got[m].right == want[m].right && got[m].size == want[m].size &&
                 std::abs(got[m].height - want[m].height) <= 1e-9;
        }
        if (!same) ++mismatches;
      }
    }
    const double secs = seconds_since(t0);
    return std::pair{mismatches == 0 && secs < 10.0, std::to_string(checked) + " dendrograms, " +
                                                         std::to_string(mismatches) + " mismatches, max height error " +
                                                         fmt(worst) + ", " + fmt(secs) + " s"};
  });

  criterion(2, "cophenetic correlation", [] {
    std::mt19937_64 rng(77);
    // (a) An ultrametric input is reproduced exactly by average linkage.
    double worst_a = 0;
    int ultrametric_inputs = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto base = random_points(rng, 4 + trial % 12, 3, Metric::euclidean);
      const auto ultra = cophenetic_matrix(agglomerate(base, Linkage::average));
      try {
        const double c = cophenetic_correlation(ultra, agglomerate(ultra, Linkage::average)).coefficient;
        worst_a = std::max(worst_a, std::abs(c - 1.0));
        ++ultrametric_inputs;
      } catch (const Error& e) {
        if (e.code() != Errc::degenerate_variance) throw;
      }
    }
    // (b) The 1-D example against a direct Pearson computation.
    const DistanceMatrix line(3, {1.0, 10.0, 9.0}, Metric::euclidean);
    const auto dend = agglomerate(line, Linkage::average);
    const auto naive = oracle::naive_linkage(oracle::square(3, line.values()), oracle::Link::average);
    const auto t = oracle::naive_cophenetic(3, naive);
    const double want = oracle::pearson({1.0, 10.0, 9.0}, {t[0][1], t[0][2], t[1][2]});
    const double got = cophenetic_correlation(line, dend).coefficient;
    const double err_b = std::abs(got - want);
    // (c) Triple inequality on random instances.
    std::size_t violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 3 + trial % 20;
      const auto link = static_cast<Linkage>(trial % 3);
      const auto coph = cophenetic_matrix(agglomerate(random_points(rng, n, 4, Metric::cosine), link));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            if (coph.at(i, k) > std::max(coph.at(i, j), coph.at(j, k)) + 1e-12) ++violations;
          }
    }
    const bool ok = ultrametric_inputs > 0 && worst_a <= 1e-9 && err_b <= 1e-9 && violations == 0;
    return std::pair{ok, "(a) " + std::to_string(ultrametric_inputs) + " ultrametric inputs, max |c-1| " +
                             fmt(worst_a) + "; (b) c=" + std::to_string(got) + " vs " + std::to_string(want) +
                             ", error " + fmt(err_b) + "; (c) 100 instances, " + std::to_string(violations) +
                             " violations"};
  });

  criterion(3, "silhouette matches direct oracle", [] {
    std::mt19937_64 rng(303);
    double worst = 0, worst_scale = 0;
    std::size_t out_of_range = 0, points = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 3 + rng() % 28;
      const std::size_t k = 2 + rng() % std::min<std::size_t>(5, n - 2);
      const auto d = random_points(rng, n, 3, trial % 2 ? Metric::cosine : Metric::euclidean);
      const auto assignment = cut(agglomerate(d, static_cast<Linkage>(trial % 3)), k);
      const auto full = oracle::square(n, d.values());
      auto scaled_values = d.values();
      for (auto& v : scaled_values) v *= 7.0;
      const DistanceMatrix scaled(n, scaled_values, d.metric());
      for (std::size_t i = 0; i < n; ++i) {
        const double s = silhouette_point(i, assignment, d);
        worst = std::max(worst, std::abs(s - oracle::silhouette(i, assignment.labels, full)));
        worst_scale = std::max(worst_scale, std::abs(s - silhouette_point(i, assignment, scaled)));
        if (s < -1.0 || s > 1.0) ++out_of_range;
        ++points;
      }
    }
    const bool ok = worst <= 1e-9 && worst_scale <= 1e-9 && out_of_range == 0;
    return std::pair{ok, std::to_string(points) + " points, max oracle error " + fmt(worst) + ", " +
                             std::to_string(out_of_range) + " outside [-1,1], max x7 scale error " + fmt(worst_scale)};
  });

  criterion(4, "analytic gradients match finite differences", [] {
    std::mt19937_64 rng(404);
    const int points = 20;
    double sg = 0, cb = 0, gl = 0, mlp = 0;
    for (int p = 0; p < points; ++p) {
      {
        const std::size_t d = 8, rows = 6;
        const auto x = oracle::random_vector(rng, d + rows * d, 0.7);
        auto f = [&](const std::vector<double>& v, std::vector<double>* g) {
          std::vector<double> gh(d), go(rows * d);
          const double loss =
              objective::skipgram_pair(std::span(v).subspan(0, d), std::span(v).subspan(d), gh, go);
          if (g) {
            *g = gh;
            g->insert(g->end(), go.begin(), go.end());
          }
          return loss;
        };
        std::vector<double> g;
        f(x, &g);
        sg = std::max(sg, oracle::relative_error(
                              g, oracle::numeric_gradient([&](const std::vector<double>& v) { return f(v, nullptr); }, x)));
      }
      {
        const std::size_t d = 6, ctx = 1 + p % 5, rows = 5;
        const auto x = oracle::random_vector(rng, ctx * d + rows * d, 0.7);
        auto f = [&](const std::vector<double>& v, std::vector<double>* g) {
          std::vector<double> gc(ctx * d), go(rows * d);
          const double loss = objective::cbow(std::span(v).subspan(0, ctx * d), d, std::span(v).subspan(ctx * d), gc, go);
          if (g) {
            *g = gc;
            g->insert(g->end(), go.begin(), go.end());
          }
          return loss;
        };
        std::vector<double> g;
        f(x, &g);
        cb = std::max(cb, oracle::relative_error(
                              g, oracle::numeric_gradient([&](const std::vector<double>& v) { return f(v, nullptr); }, x)));
      }
      {
        const std::size_t d = 6;
        const auto x = oracle::random_vector(rng, 2 * d + 2, 0.5);
        const double count = std::uniform_real_distribution<double>(0.5, 200.0)(rng);
        auto f = [&](const std::vector<double>& v, std::vector<double>* g) {
          std::vector<double> gw(d), gc(d);
          objective::GloveGrad gb;
          const double loss = objective::glove_pair(std::span(v).subspan(0, d), std::span(v).subspan(d, d), v[2 * d],
                                                    v[2 * d + 1], count, 100.0, 0.75, gw, gc, gb);
          if (g) {
            *g = gw;
            g->insert(g->end(), gc.begin(), gc.end());
            g->push_back(gb.bias_word);
            g->push_back(gb.bias_context);
          }
          return loss;
        };
        std::vector<double> g;
        f(x, &g);
        gl = std::max(gl, oracle::relative_error(
                              g, oracle::numeric_gradient([&](const std::vector<double>& v) { return f(v, nullptr); }, x)));
      }
      {
        LabeledDataset data;
        data.dim = 5;
        data.label_names = {"a", "b", "c"};
        for (int i = 0; i < 8; ++i) data.add(oracle::random_vector(rng, 5), rng() % 3);
        std::vector<std::size_t> rows(data.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        MlpClassifier net(5, {6, 4}, 3, 500 + p);
        for (auto& l : net.layers())
          for (auto& b : l.bias) b = 0.1 * oracle::random_vector(rng, 1)[0];
        std::vector<DenseLayer> grad;
        net.loss_and_gradient(data, rows, grad);
        auto flatten = [](const std::vector<DenseLayer>& layers) {
          std::vector<double> out;
          for (const auto& l : layers) {
            out.insert(out.end(), l.weights.begin(), l.weights.end());
            out.insert(out.end(), l.bias.begin(), l.bias.end());
          }
          return out;
        };
        auto probe = net;
        const auto numeric = oracle::numeric_gradient(
            [&](const std::vector<double>& flat) {
              std::size_t at = 0;
              for (auto& l : probe.layers()) {
                for (auto& w : l.weights) w = flat[at++];
                for (auto& b : l.bias) b = flat[at++];
              }
              return probe.loss(data, rows);
            },
            flatten(net.layers()));
        mlp = std::max(mlp, oracle::relative_error(flatten(grad), numeric));
      }
    }
    const bool ok = sg < 1e-4 && cb < 1e-4 && gl < 1e-4 && mlp < 1e-4;
    return std::pair{ok, std::to_string(points) + " points each; max relative error skip-gram " + fmt(sg) + ", CBOW " +
                             fmt(cb) + ", GloVe " + fmt(gl) + ", MLP " + fmt(mlp)};
  });

  std::optional<FixtureRun> fixture;
  criterion(5, "synthetic concept recovery", [&] {
    fixture = run_fixture(scratch / "fixture_a");
    const auto assignment = load_assignment(fixture->cfg.output_dir / "assignment.tsv");
    const auto items = load_item_table(fixture->cfg.output_dir / "items.tsv");
    std::map<std::string, std::size_t> concept_ids;
    std::vector<std::size_t> truth, found;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto it = fixture->truth.find(items[i]);
      const std::string concept_name = it == fixture->truth.end() ? "(none)" : it->second;
      truth.push_back(concept_ids.emplace(concept_name, concept_ids.size()).first->second);
      found.push_back(assignment.labels[i]);
    }
    const double ari = oracle::adjusted_rand_index(truth, found);
    const std::size_t k = fixture->report.best_k;
    const bool ok = k >= 5 && k <= 7 && ari >= 0.8 && fixture->seconds < 120.0;
    return std::pair{ok, "best_k " + std::to_string(k) + " (want 6 +/- 1), ARI " + fmt(ari) + " over " +
                             std::to_string(items.size()) + " keywords, " + fmt(fixture->seconds) + " s"};
  });

  std::map<std::string, ClassifierModel> models;
  criterion(6, "classifiers on held-out synthetic vectors", [&] {
    if (!fixture) throw std::runtime_error("no fixture run");
    const auto emb = load_vectors(fixture->cfg.output_dir / "models" / (fixture->report.winner + ".vec"));
    std::vector<std::pair<std::string, std::string>> words(fixture->truth.begin(), fixture->truth.end());
    const auto parts = split(dataset_from_words(words, emb), 0.8, fixture->cfg.seed);
    std::string detail = std::to_string(parts.train.size()) + "/" + std::to_string(parts.test.size()) + " split;";
    bool ok = !parts.test.empty();
    for (auto kind : fixture->cfg.classifiers) {
      auto model = train_classifier(kind, parts.train, fixture->cfg.classifier_settings);
      const double acc = evaluate(model, parts.test).accuracy;
      ok = ok && acc > 0.85;
      detail += " " + std::string(to_string(kind)) + " " + fmt(acc);
      models.emplace(std::string(to_string(kind)), std::move(model));
    }
    ok = ok && models.size() == 3;
    std::mt19937_64 rng(606);
    std::size_t mismatched = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t labels = 2 + rng() % 6, n = 1 + rng() % 60;
      std::vector<std::size_t> t(n), p(n);
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = rng() % labels;
        p[i] = rng() % 2 ? t[i] : rng() % labels;
      }
      const auto got = evaluate_predictions(t, p, labels);
      const auto want = oracle::from_predictions(t, p, labels);
      if (std::abs(got.accuracy - want.accuracy) > 1e-12 || std::abs(got.precision - want.precision) > 1e-12 ||
          std::abs(got.recall - want.recall) > 1e-12 || std::abs(got.f1 - want.f1) > 1e-12) {
        ++mismatched;
      }
    }
    ok = ok && mismatched == 0;
    return std::pair{ok, detail + "; metrics oracle " + std::to_string(100 - mismatched) + "/100 sets match"};
  });

  criterion(7, "file formats round-trip byte-stably", [&] {
    if (!fixture) throw std::runtime_error("no fixture run");
    const auto out = fixture->cfg.output_dir;
    const auto dir = scratch / "round_trip";
    fs::create_directories(dir);
    std::vector<std::string> broken;
    auto check = [&](const std::string& name, const fs::path& first, const std::function<void(const fs::path&)>& resave) {
      const auto again = dir / (name + ".again");
      resave(again);
      if (slurp(first) != slurp(again)) broken.push_back(name);
    };

    // Vectors: retraining the winner reproduces the in-memory values, which
    // the file must hold to within print precision.
    const auto vec_path = out / "models" / (fixture->report.winner + ".vec");
    check("vectors", vec_path, [&](const fs::path& p) { save_vectors(p, load_vectors(vec_path)); });
    TrainConfig tc = fixture->cfg.grid.front();
    for (const auto& t : fixture->cfg.grid) {
      if (model_name(t) == fixture->report.winner) tc = t;
    }
    const auto trained = train_embeddings(read_token_stream(out / "tokens.txt"), tc);
    const auto loaded = load_vectors(vec_path);
    double worst = trained.size() == loaded.size() && trained.dim() == loaded.dim() ? 0.0 : 1.0;
    for (std::size_t i = 0; worst < 1.0 && i < trained.size(); ++i)
      for (std::size_t j = 0; j < trained.dim(); ++j)
        worst = std::max(worst, std::abs(trained.row(i)[j] - loaded.row(i)[j]));
    if (worst > 1e-6) broken.push_back("vector precision");

    check("dendrogram", out / "dendrogram.jsonl", [&](const fs::path& p) {
      save_dendrogram(p, load_dendrogram(out / "dendrogram.jsonl"));
    });
    check("review", out / "review.txt", [&](const fs::path& p) { save_review(p, load_review(out / "review.txt")); });

    // Concept tree from a labeled copy of the review.
    auto review = load_review(out / "review.txt");
    for (auto& b : review.blocks) b.label = "concept " + std::to_string(b.cluster_id);
    const auto tree = build_concept_tree(import_review(review), load_dendrogram(out / "dendrogram.jsonl"),
                                         load_item_table(out / "items.tsv"));
    const auto tree_path = dir / "concept_tree.json";
    save_concept_tree(tree_path, tree);
    check("concept tree", tree_path, [&](const fs::path& p) { save_concept_tree(p, load_concept_tree(tree_path)); });

    for (const auto& [name, model] : models) {
      const auto path = dir / (name + ".json");
      save_model(path, model);
      check(name + " model", path, [&](const fs::path& p) { save_model(p, load_model(path)); });
    }
    if (models.size() != 3) broken.push_back("models missing");
    std::string detail = "vectors, dendrogram, review, concept tree, " + std::to_string(models.size()) +
                         " models; max vector error " + fmt(worst);
    for (const auto& b : broken) detail += "; unstable: " + b;
    return std::pair{broken.empty(), detail};
  });

  criterion(8, "pipeline rerun is byte-identical", [&] {
    if (!fixture) throw std::runtime_error("no fixture run");
    const auto other = run_fixture(scratch / "fixture_b");
    const auto a = snapshot(fixture->cfg.output_dir), b = snapshot(other.cfg.output_dir);
    std::size_t differing = 0;
    for (const auto& [name, bytes] : a) {
      const auto it = b.find(name);
      if (it == b.end() || it->second != bytes) ++differing;
    }
    differing += b.size() > a.size() ? b.size() - a.size() : 0;
    const bool has_manifest = a.count(std::string(kManifestFile)) > 0;
    return std::pair{differing == 0 && has_manifest && a.size() == b.size(),
                     std::to_string(a.size()) + " files compared across two fixture directories, " +
                         std::to_string(differing) + " differ"};
  });

  fs::remove_all(scratch);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
