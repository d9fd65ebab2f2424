#include "cdisc/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <functional>

#include "cdisc/error.hpp"
#include "cdisc/hierarchy.hpp"
#include "cdisc/preprocess.hpp"
#include "cdisc/selection.hpp"
#include "json.hpp"
#include "text_io.hpp"

namespace cdisc {

namespace fs = std::filesystem;

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

template <typename T, typename F>
std::vector<T> parse_each(const std::vector<std::string>& items, F f) {
  std::vector<T> out;
  for (const auto& s : items) out.push_back(f(s));
  return out;
}

std::vector<std::string> list_or(const Config& c, std::string_view key, std::vector<std::string> fallback) {
  auto v = c.get_list(key, fallback);
  if (v.empty()) throw Error(Errc::config, "config key '" + std::string(key) + "' must not be empty");
  return v;
}

}  // namespace

const std::set<std::string>& pipeline_config_keys() {
  static const std::set<std::string> keys{
      "corpus.path", "corpus.stopwords", "corpus.lemma_exceptions", "output.dir", "review.labeled",
      "nouns.lexicon", "nouns.unknown_is_noun", "nouns.k", "nouns.candidates", "nouns.threshold",
      "embedding.arch", "embedding.dim", "embedding.window", "embedding.min_count", "embedding.epochs",
      "embedding.negative", "embedding.learning_rate", "embedding.subsample", "embedding.symmetric",
      "embedding.x_max", "cluster.metric", "cluster.linkage", "select.k_min", "select.k_max",
      "classify.models", "classify.train_fraction", "classify.mlp.hidden", "classify.mlp.epochs",
      "classify.mlp.learning_rate", "classify.mlp.batch_size", "classify.knn.k", "classify.knn.metric",
      "classify.rf.trees", "classify.rf.max_features", "classify.rf.max_depth", "classify.rf.min_samples_split",
      "seed", "workers"};
  return keys;
}

std::string model_name(const TrainConfig& cfg) {
  std::string name = std::string(to_string(cfg.arch)) + "-d" + std::to_string(cfg.dim) + "-w" +
                     std::to_string(cfg.window) + "-m" + std::to_string(cfg.min_count) + "-e" +
                     std::to_string(cfg.epochs);
  if (cfg.arch == Architecture::glove) name += cfg.symmetric_context ? "-sym" : "-asym";
  return name;
}

PipelineConfig PipelineConfig::from_config(const Config& c, const fs::path& base, std::optional<std::uint64_t> seed,
                                           std::optional<std::size_t> workers) {
  c.require_known(pipeline_config_keys());
  PipelineConfig p;
  p.seed = seed ? *seed : c.get_uint("seed", 1);
  p.workers = workers ? *workers : c.get_uint("workers", 1);
  if (p.workers == 0) throw Error(Errc::config, "workers must be at least 1");

  if (!c.has("corpus.path")) throw Error(Errc::config, "config key 'corpus.path' is required");
  p.corpus = resolve(base, c.get_string("corpus.path"));
  p.stopwords = resolve(base, c.get_string("corpus.stopwords"));
  p.lemma_exceptions = resolve(base, c.get_string("corpus.lemma_exceptions"));
  p.output_dir = resolve(base, c.get_string("output.dir", "out"));
  p.labeled_review = c.has("review.labeled") ? resolve(base, c.get_string("review.labeled"))
                                             : p.output_dir / "review_labeled.txt";

  p.noun_lexicon = resolve(base, c.get_string("nouns.lexicon"));
  p.unknown_is_noun = c.get_bool("nouns.unknown_is_noun", true);
  p.top_k = c.get_uint("nouns.k", 10000);
  if (p.top_k == 0) throw Error(Errc::config, "nouns.k must be at least 1");
  p.candidates.candidates = c.get_list("nouns.candidates", p.candidates.candidates);
  p.candidates.threshold = c.get_double("nouns.threshold", p.candidates.threshold);
  if (p.candidates.threshold < 0) throw Error(Errc::config, "nouns.threshold must be non-negative");

  const auto archs = parse_each<Architecture>(list_or(c, "embedding.arch", {"skipgram"}),
                                              [](const std::string& s) { return parse_architecture(s); });
  const auto dims = c.get_uint_list("embedding.dim", {300});
  const auto min_counts = c.get_uint_list("embedding.min_count", {5});
  const auto symmetric = parse_each<bool>(list_or(c, "embedding.symmetric", {"true"}), [&](const std::string& s) {
    Config one;
    one.set("embedding.symmetric", s);
    return one.get_bool("embedding.symmetric", true);
  });
  for (auto arch : archs) {
    const auto base_cfg = TrainConfig::defaults(arch);
    const auto windows = c.get_uint_list("embedding.window", {base_cfg.window});
    const auto epochs = c.get_uint_list("embedding.epochs", {base_cfg.epochs});
    const auto sym_axis = arch == Architecture::glove ? symmetric : std::vector<bool>{true};
    for (auto d : dims)
      for (auto w : windows)
        for (auto m : min_counts)
          for (auto e : epochs)
            for (bool s : sym_axis) {
              auto t = base_cfg;
              t.dim = d;
              t.window = w;
              t.min_count = m;
              t.epochs = e;
              t.symmetric_context = s;
              t.negative = c.get_uint("embedding.negative", t.negative);
              t.learning_rate = c.get_double("embedding.learning_rate", t.learning_rate);
              t.subsample = c.get_double("embedding.subsample", t.subsample);
              t.x_max = c.get_double("embedding.x_max", t.x_max);
              t.seed = p.seed;
              t.workers = p.workers;
              if (t.dim == 0 || t.window == 0 || t.epochs == 0 || t.min_count == 0) {
                throw Error(Errc::config, "embedding dim, window, epochs and min_count must be positive");
              }
              p.grid.push_back(t);
            }
  }
  std::set<std::string> names;
  for (const auto& t : p.grid) {
    if (!names.insert(model_name(t)).second) throw Error(Errc::config, "duplicate grid model " + model_name(t));
  }

  p.metric = parse_metric(c.get_string("cluster.metric", "cosine"));
  p.linkage = parse_linkage(c.get_string("cluster.linkage", "average"));
  p.k_min = c.get_uint("select.k_min", 2);
  p.k_max = c.get_uint("select.k_max", 0);

  p.classifiers = parse_each<ClassifierKind>(list_or(c, "classify.models", {"mlp", "knn", "rf"}),
                                             [](const std::string& s) { return parse_classifier_kind(s); });
  p.train_fraction = c.get_double("classify.train_fraction", 0.8);
  if (!(p.train_fraction > 0 && p.train_fraction < 1)) {
    throw Error(Errc::config, "classify.train_fraction must lie in (0, 1)");
  }
  auto& s = p.classifier_settings;
  {
    auto hidden = c.get_uint_list("classify.mlp.hidden", {300, 300});
    s.mlp.hidden.assign(hidden.begin(), hidden.end());
  }
  s.mlp.epochs = c.get_uint("classify.mlp.epochs", s.mlp.epochs);
  s.mlp.learning_rate = c.get_double("classify.mlp.learning_rate", s.mlp.learning_rate);
  s.mlp.batch_size = c.get_uint("classify.mlp.batch_size", s.mlp.batch_size);
  s.mlp.seed = p.seed;
  s.knn.k = c.get_uint("classify.knn.k", s.knn.k);
  s.knn.metric = parse_metric(c.get_string("classify.knn.metric", "cosine"));
  s.forest.trees = c.get_uint("classify.rf.trees", s.forest.trees);
  s.forest.max_features = c.get_uint("classify.rf.max_features", s.forest.max_features);
  s.forest.max_depth = c.get_uint("classify.rf.max_depth", s.forest.max_depth);
  s.forest.min_samples_split = c.get_uint("classify.rf.min_samples_split", s.forest.min_samples_split);
  s.forest.seed = p.seed;
  s.forest.workers = p.workers;
  return p;
}

PipelineConfig PipelineConfig::load(const fs::path& path, std::optional<std::uint64_t> seed,
                                    std::optional<std::size_t> workers) {
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return from_config(Config::load(path), base, seed, workers);
}

void PipelineConfig::validate() const {
  auto need = [](const fs::path& p, std::string_view what) {
    if (!p.empty() && !fs::exists(p)) {
      throw Error(Errc::config, std::string(what) + " not found: " + p.string());
    }
  };
  if (corpus.empty()) throw Error(Errc::config, "no corpus configured");
  need(corpus, "corpus");
  need(stopwords, "stopword list");
  need(lemma_exceptions, "lemma exception table");
  need(noun_lexicon, "noun lexicon");
  if (grid.empty()) throw Error(Errc::config, "embedding grid is empty");
  if (classifiers.empty()) throw Error(Errc::config, "no classifiers configured");
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::io, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

const StageRecord* Manifest::find(std::string_view stage) const {
  for (const auto& s : stages) {
    if (s.stage == stage) return &s;
  }
  return nullptr;
}

void Manifest::upsert(StageRecord record) {
  for (auto& s : stages) {
    if (s.stage == record.stage) {
      s = std::move(record);
      return;
    }
  }
  stages.push_back(std::move(record));
}

std::string format_manifest(const Manifest& m) {
  json stages = json::array();
  for (const auto& s : m.stages) {
    stages.push_back({{"stage", s.stage}, {"inputs", s.inputs}, {"parameters", s.parameters}, {"outputs", s.outputs}});
  }
  json j{{"format", "cdisc-manifest"}, {"version", 1}, {"stages", stages}};
  return j.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text) {
  try {
    auto j = json::parse(text);
    if (j.at("format") != "cdisc-manifest") throw Error(Errc::parse, "not a pipeline manifest");
    Manifest m;
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.stage = s.at("stage").get<std::string>();
      r.inputs = s.at("inputs").get<std::map<std::string, std::string>>();
      r.parameters = s.at("parameters").get<std::map<std::string, std::string>>();
      r.outputs = s.at("outputs").get<std::map<std::string, std::string>>();
      m.stages.push_back(std::move(r));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("malformed manifest: ") + e.what());
  }
}

namespace {

std::string hash_path(const fs::path& p) {
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& f : files) listing += f.filename().string() + "\t" + sha256_hex(detail::read_file(f)) + "\n";
    return sha256_hex(listing);
  }
  return sha256_hex(detail::read_file(p));
}

class Runner {
 public:
  explicit Runner(const PipelineConfig& cfg) : out_(cfg.output_dir) {
    const auto manifest_path = out_ / kManifestFile;
    if (fs::exists(manifest_path)) previous_ = parse_manifest(detail::read_file(manifest_path));
    current_ = previous_;
  }

  fs::path out(const std::string& rel) const { return out_ / rel; }
  const Manifest& previous() const { return previous_; }

  // `inputs` maps a stable name to a file or directory; `outputs` are
  // relative to the output directory.
  void stage(const std::string& name, const std::map<std::string, fs::path>& inputs,
             const std::map<std::string, std::string>& parameters, const std::vector<std::string>& outputs,
             const std::function<void()>& body) {
    StageRecord rec;
    rec.stage = name;
    rec.parameters = parameters;
    try {
      for (const auto& [key, path] : inputs) {
        if (!path.empty()) rec.inputs[key] = hash_path(path);
      }
    } catch (const Error& e) {
      throw Error(Errc::stage_failed, "stage '" + name + "': " + e.what());
    }
    if (const auto* old = previous_.find(name);
        old && old->inputs == rec.inputs && old->parameters == rec.parameters && outputs_intact(*old, outputs)) {
      report_.stages.push_back({name, true});
      current_.upsert(*old);
      return;
    }
    try {
      body();
      for (const auto& rel : outputs) rec.outputs[rel] = hash_path(out(rel));
    } catch (const std::exception& e) {
      throw Error(Errc::stage_failed, "stage '" + name + "': " + e.what());
    }
    current_.upsert(std::move(rec));
    report_.stages.push_back({name, false});
    detail::write_file(out_ / kManifestFile, format_manifest(current_));
  }

  void finish(std::vector<std::string> order) {
    // Stages are listed in pipeline order regardless of when they last ran.
    Manifest sorted;
    for (const auto& name : order) {
      if (const auto* s = current_.find(name)) sorted.stages.push_back(*s);
    }
    current_ = std::move(sorted);
    detail::write_file(out_ / kManifestFile, format_manifest(current_));
  }

  RunReport& report() { return report_; }

 private:
  bool outputs_intact(const StageRecord& old, const std::vector<std::string>& outputs) const {
    if (old.outputs.size() != outputs.size()) return false;
    for (const auto& rel : outputs) {
      auto it = old.outputs.find(rel);
      if (it == old.outputs.end() || !fs::exists(out(rel)) || hash_path(out(rel)) != it->second) return false;
    }
    return true;
  }

  fs::path out_;
  Manifest previous_;
  Manifest current_;
  RunReport report_;
};

std::vector<std::string> run_stage_order() {
  return {"preprocess", "extract-nouns", "train-embeddings", "compare-models",
          "cluster",    "select-k",      "cut",              "export-review"};
}

std::vector<std::string> all_stage_order() {
  auto v = run_stage_order();
  v.push_back("build-tree");
  v.push_back("classify");
  return v;
}

std::map<std::string, std::string> grid_parameters(const PipelineConfig& cfg) {
  std::map<std::string, std::string> p;
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    const auto& t = cfg.grid[i];
    const auto prefix = "model" + std::to_string(i) + ".";
    p[prefix + "name"] = model_name(t);
    p[prefix + "negative"] = std::to_string(t.negative);
    p[prefix + "learning_rate"] = fmt17(t.learning_rate);
    p[prefix + "subsample"] = fmt17(t.subsample);
    p[prefix + "x_max"] = fmt17(t.x_max);
  }
  p["seed"] = std::to_string(cfg.seed);
  p["workers"] = std::to_string(cfg.workers);
  return p;
}

std::vector<NamedModel> load_grid(const Runner& r, const PipelineConfig& cfg) {
  std::vector<NamedModel> models;
  for (const auto& t : cfg.grid) {
    models.push_back({model_name(t), load_vectors(r.out("models/" + model_name(t) + ".vec"))});
  }
  return models;
}

std::string read_winner(const Runner& r) {
  auto lines = detail::split_lines(detail::read_file(r.out("comparison.tsv")));
  if (lines.size() < 2) throw Error(Errc::parse, "comparison.tsv has no models");
  auto row = lines[1];
  return std::string(row.substr(0, row.find('\t')));
}

std::vector<ModelScore> read_ranking(const Runner& r) {
  std::vector<ModelScore> out;
  auto lines = detail::split_lines(detail::read_file(r.out("comparison.tsv")));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto tab = lines[i].find('\t');
    out.push_back({std::string(lines[i].substr(0, tab)), detail::parse_double(lines[i].substr(tab + 1))});
  }
  return out;
}

}  // namespace

RunReport run_all(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  Runner r(cfg);

  r.stage("preprocess",
          {{"corpus", cfg.corpus}, {"stopwords", cfg.stopwords}, {"lemma_exceptions", cfg.lemma_exceptions}}, {},
          {"tokens.txt"}, [&] {
            const auto stops = cfg.stopwords.empty() ? StopwordList::builtin() : StopwordList::load(cfg.stopwords);
            const auto lemm =
                cfg.lemma_exceptions.empty() ? Lemmatizer::builtin() : Lemmatizer::load(cfg.lemma_exceptions);
            TokenStream all;
            for (const auto& doc : read_corpus(cfg.corpus)) {
              auto s = preprocess(doc, stops, lemm);
              all.insert(all.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
            }
            if (all.empty()) throw Error(Errc::empty_input, "corpus is empty after preprocessing");
            write_token_stream(r.out("tokens.txt"), all);
          });

  r.stage("extract-nouns", {{"tokens", r.out("tokens.txt")}, {"lexicon", cfg.noun_lexicon}},
          {{"k", std::to_string(cfg.top_k)}, {"unknown_is_noun", cfg.unknown_is_noun ? "true" : "false"}},
          {"nouns.txt"}, [&] {
            const auto tagger = cfg.noun_lexicon.empty() ? LexiconTagger::builtin(cfg.unknown_is_noun)
                                                         : LexiconTagger::load(cfg.noun_lexicon, cfg.unknown_is_noun);
            const auto freq = count_frequencies(read_token_stream(r.out("tokens.txt")));
            write_token_list(r.out("nouns.txt"), top_k_nouns(freq, tagger, cfg.top_k));
          });

  std::vector<std::string> model_files;
  for (const auto& t : cfg.grid) model_files.push_back("models/" + model_name(t) + ".vec");
  r.stage("train-embeddings", {{"tokens", r.out("tokens.txt")}}, grid_parameters(cfg), model_files, [&] {
    const auto corpus = read_token_stream(r.out("tokens.txt"));
    for (const auto& t : cfg.grid) save_vectors(r.out("models/" + model_name(t) + ".vec"), train_embeddings(corpus, t));
  });

  {
    std::map<std::string, fs::path> inputs{{"nouns", r.out("nouns.txt")}};
    for (const auto& f : model_files) inputs[f] = r.out(f);
    std::string candidates;
    for (const auto& c : cfg.candidates.candidates) candidates += (candidates.empty() ? "" : ",") + c;
    r.stage("compare-models", inputs,
            {{"metric", std::string(to_string(cfg.metric))},
             {"linkage", std::string(to_string(cfg.linkage))},
             {"candidates", candidates},
             {"threshold", fmt17(cfg.candidates.threshold)}},
            {"comparison.tsv", "keywords.txt"}, [&] {
              auto models = load_grid(r, cfg);
              auto nouns = read_token_list(r.out("nouns.txt"));
              // The keyword filter uses the first grid model's geometry.
              if (!cfg.candidates.candidates.empty()) {
                nouns = filter_by_candidates(nouns, models.front().vectors, cfg.candidates);
              }
              auto cmp = compare_models(models, nouns, cfg.metric, cfg.linkage);
              std::string table = "model\tcophenetic\n";
              for (const auto& s : cmp.ranking) table += s.name + "\t" + fmt17(s.coefficient) + "\n";
              detail::write_file(r.out("comparison.tsv"), table);
              write_token_list(r.out("keywords.txt"), cmp.items);
            });
  }

  const std::string winner_file = "models/" + read_winner(r) + ".vec";
  r.stage("cluster", {{"keywords", r.out("keywords.txt")}, {"winner", r.out(winner_file)}},
          {{"winner", winner_file},
           {"metric", std::string(to_string(cfg.metric))},
           {"linkage", std::string(to_string(cfg.linkage))}},
          {"dendrogram.jsonl", "items.tsv", "distances.txt"}, [&] {
            const auto emb = load_vectors(r.out(winner_file));
            const auto items = read_token_list(r.out("keywords.txt"));
            auto dist = pairwise_distances(emb, items, cfg.metric);
            save_dendrogram(r.out("dendrogram.jsonl"), agglomerate(dist, cfg.linkage));
            save_item_table(r.out("items.tsv"), items);
            save_distances(r.out("distances.txt"), dist);
          });

  r.stage("select-k", {{"dendrogram", r.out("dendrogram.jsonl")}, {"distances", r.out("distances.txt")}},
          {{"k_min", std::to_string(cfg.k_min)}, {"k_max", std::to_string(cfg.k_max)}}, {"silhouette.csv"}, [&] {
            const auto dend = load_dendrogram(r.out("dendrogram.jsonl"));
            const auto dist = load_distances(r.out("distances.txt"));
            const auto k_max = cfg.k_max ? cfg.k_max : default_k_max(dend.leaves());
            save_sweep(r.out("silhouette.csv"), sweep_k(dend, dist, cfg.k_min, k_max, cfg.workers));
          });

  r.stage("cut", {{"dendrogram", r.out("dendrogram.jsonl")}, {"silhouette", r.out("silhouette.csv")}}, {},
          {"assignment.tsv"}, [&] {
            const auto dend = load_dendrogram(r.out("dendrogram.jsonl"));
            const auto sweep = load_sweep(r.out("silhouette.csv"));
            save_assignment(r.out("assignment.tsv"), cut(dend, sweep.best_k), load_item_table(r.out("items.tsv")));
          });

  r.stage("export-review",
          {{"assignment", r.out("assignment.tsv")},
           {"dendrogram", r.out("dendrogram.jsonl")},
           {"distances", r.out("distances.txt")},
           {"items", r.out("items.tsv")}},
          {}, {"review.txt"}, [&] {
            const auto review =
                export_review(load_assignment(r.out("assignment.tsv")), load_dendrogram(r.out("dendrogram.jsonl")),
                              load_distances(r.out("distances.txt")), load_item_table(r.out("items.tsv")));
            save_review(r.out("review.txt"), review);
          });

  r.finish(all_stage_order());
  auto report = r.report();
  report.ranking = read_ranking(r);
  report.winner = report.ranking.front().name;
  const auto sweep = load_sweep(r.out("silhouette.csv"));
  report.best_k = sweep.best_k;
  report.best_average = sweep.best_average;
  return report;
}

RunReport resume(const PipelineConfig& cfg) {
  cfg.validate();
  Runner r(cfg);
  for (const auto& name : run_stage_order()) {
    if (!r.previous().find(name)) {
      throw Error(Errc::stage_failed, "stage '" + name + "' has not run; run the pipeline before resume");
    }
  }
  if (!fs::exists(cfg.labeled_review)) {
    throw Error(Errc::config, "labeled review not found: " + cfg.labeled_review.string() +
                                  " (copy review.txt there and fill in the cluster labels)");
  }
  const std::string winner_file = "models/" + read_winner(r) + ".vec";

  r.stage("build-tree",
          {{"review", cfg.labeled_review}, {"dendrogram", r.out("dendrogram.jsonl")}, {"items", r.out("items.tsv")}},
          {}, {"concept_tree.json", "concept_tree.txt"}, [&] {
            const auto review = import_review(load_review(cfg.labeled_review));
            const auto tree =
                build_concept_tree(review, load_dendrogram(r.out("dendrogram.jsonl")), load_item_table(r.out("items.tsv")));
            save_concept_tree(r.out("concept_tree.json"), tree);
            detail::write_file(r.out("concept_tree.txt"), tree.outline());
          });

  std::vector<std::string> outputs{"evaluation.txt"};
  std::string kinds;
  for (auto k : cfg.classifiers) {
    outputs.push_back("classifiers/" + std::string(to_string(k)) + ".json");
    kinds += (kinds.empty() ? "" : ",") + std::string(to_string(k));
  }
  const auto& s = cfg.classifier_settings;
  std::string hidden;
  for (auto h : s.mlp.hidden) hidden += (hidden.empty() ? "" : ",") + std::to_string(h);
  std::vector<std::pair<std::string, EvaluationReport>> evaluations;
  r.stage("classify", {{"tree", r.out("concept_tree.json")}, {"winner", r.out(winner_file)}},
          {{"models", kinds},
           {"train_fraction", fmt17(cfg.train_fraction)},
           {"mlp.hidden", hidden},
           {"mlp.epochs", std::to_string(s.mlp.epochs)},
           {"mlp.learning_rate", fmt17(s.mlp.learning_rate)},
           {"mlp.batch_size", std::to_string(s.mlp.batch_size)},
           {"knn.k", std::to_string(s.knn.k)},
           {"knn.metric", std::string(to_string(s.knn.metric))},
           {"rf.trees", std::to_string(s.forest.trees)},
           {"rf.max_features", std::to_string(s.forest.max_features)},
           {"rf.max_depth", std::to_string(s.forest.max_depth)},
           {"rf.min_samples_split", std::to_string(s.forest.min_samples_split)},
           {"seed", std::to_string(cfg.seed)}},
          outputs, [&] {
            const auto tree = load_concept_tree(r.out("concept_tree.json"));
            const auto data = dataset_from_tree(tree, load_vectors(r.out(winner_file)));
            const auto parts = split(data, cfg.train_fraction, cfg.seed);
            for (auto kind : cfg.classifiers) {
              const auto model = train_classifier(kind, parts.train, s);
              save_model(r.out("classifiers/" + std::string(to_string(kind)) + ".json"), model);
              evaluations.emplace_back(std::string(to_string(kind)), evaluate(model, parts.test));
            }
            std::string text = format_report_table(evaluations);
            for (const auto& w : parts.warnings) text += "warning: " + w + "\n";
            text += "train " + std::to_string(parts.train.size()) + ", test " + std::to_string(parts.test.size()) + "\n";
            detail::write_file(r.out("evaluation.txt"), text);
          });

  r.finish(all_stage_order());
  auto report = r.report();
  report.ranking = read_ranking(r);
  report.winner = report.ranking.front().name;
  report.evaluations = std::move(evaluations);
  return report;
}

}  // namespace cdisc
