#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cdisc/classify.hpp"
#include "cdisc/clustering.hpp"
#include "cdisc/embedding.hpp"
#include "cdisc/error.hpp"
#include "cdisc/hierarchy.hpp"
#include "cdisc/pipeline.hpp"
#include "cdisc/preprocess.hpp"
#include "cdisc/selection.hpp"
#include "cdisc/synthetic.hpp"
#include "cdisc/vocab.hpp"

namespace fs = std::filesystem;
using namespace cdisc;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path sidecar(const fs::path& dendrogram) {
  auto p = dendrogram;
  p += ".items.tsv";
  return p;
}

void print_run(const RunReport& report) {
  for (const auto& s : report.stages) std::cout << (s.cached ? "cached  " : "ran     ") << s.stage << "\n";
  if (!report.ranking.empty()) {
    std::cout << "models by cophenetic coefficient:\n";
    for (const auto& m : report.ranking) std::cout << "  " << m.name << "\t" << m.coefficient << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cdisc: concept discovery from raw text"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Tokenize, clean and lemmatize a corpus");
  fs::path pre_in, pre_stops, pre_lemmas, pre_out;
  pre->add_option("--input", pre_in, "Corpus file (one document per line) or directory of .txt files")->required();
  pre->add_option("--stopwords", pre_stops, "Stopword list (default: built-in)");
  pre->add_option("--lemma-exceptions", pre_lemmas, "Lemma exception table (default: built-in)");
  pre->add_option("--output", pre_out, "Token stream, one sentence per line")->required();
  pre->callback([&] {
    const auto stops = pre_stops.empty() ? StopwordList::builtin() : StopwordList::load(pre_stops);
    const auto lemm = pre_lemmas.empty() ? Lemmatizer::builtin() : Lemmatizer::load(pre_lemmas);
    TokenStream all;
    std::size_t docs = 0;
    for (const auto& doc : read_corpus(pre_in)) {
      auto s = preprocess(doc, stops, lemm);
      all.insert(all.end(), s.begin(), s.end());
      ++docs;
    }
    write_token_stream(pre_out, all);
    std::cout << docs << " documents, " << all.size() << " sentences\n";
  });

  // extract-nouns
  auto* nouns = app.add_subcommand("extract-nouns", "Most frequent nouns, optionally filtered by candidate seeds");
  fs::path n_corpus, n_vectors, n_lexicon, n_pretagged, n_out;
  std::size_t n_k = 10000;
  std::string n_candidates = "restaurant,food,beverage";
  double n_threshold = 0.5;
  bool n_unknown_not_noun = false;
  nouns->add_option("--corpus", n_corpus, "Preprocessed token stream");
  nouns->add_option("--pretagged", n_pretagged, "token/TAG corpus used instead of --corpus and the lexicon");
  nouns->add_option("--vectors", n_vectors, "Vector file for the candidate filter (omit to skip it)");
  nouns->add_option("--lexicon", n_lexicon, "Noun lexicon (default: built-in)");
  nouns->add_flag("--unknown-not-noun", n_unknown_not_noun, "Tag unknown tokens without a noun suffix as non-nouns");
  nouns->add_option("--k", n_k, "Number of nouns kept before filtering")->capture_default_str();
  nouns->add_option("--candidates", n_candidates, "Comma separated candidate nouns")->capture_default_str();
  nouns->add_option("--threshold", n_threshold, "Cosine distance threshold")->capture_default_str();
  nouns->add_option("--output", n_out, "Keyword list")->required();
  nouns->callback([&] {
    if (n_corpus.empty() == n_pretagged.empty()) throw CLI::ValidationError("give exactly one of --corpus, --pretagged");
    std::vector<std::string> top;
    if (!n_pretagged.empty()) {
      auto tagged = load_pretagged(n_pretagged);
      top = top_k_nouns(count_frequencies(tagged.tokens), tagged.tagger, n_k);
    } else {
      const auto tagger = n_lexicon.empty() ? LexiconTagger::builtin(!n_unknown_not_noun)
                                            : LexiconTagger::load(n_lexicon, !n_unknown_not_noun);
      top = top_k_nouns(count_frequencies(read_token_stream(n_corpus)), tagger, n_k);
    }
    if (!n_vectors.empty()) {
      CandidateFilterConfig cfg{split_commas(n_candidates), n_threshold};
      top = filter_by_candidates(top, load_vectors(n_vectors), cfg);
    }
    write_token_list(n_out, top);
    std::cout << top.size() << " keywords\n";
  });

  // train-embeddings
  auto* train = app.add_subcommand("train-embeddings", "Train skip-gram, CBOW or GloVe vectors");
  fs::path t_corpus, t_out;
  std::string t_arch = "skipgram";
  std::optional<std::size_t> t_window, t_iters;
  std::optional<double> t_lr;
  TrainConfig t_base;
  bool t_asym = false;
  train->add_option("--corpus", t_corpus, "Preprocessed token stream")->required();
  train->add_option("--arch", t_arch, "skipgram | cbow | glove")->capture_default_str();
  train->add_option("--dim", t_base.dim)->capture_default_str();
  train->add_option("--window", t_window, "Context window (default 5, GloVe 10)");
  train->add_option("--min-count", t_base.min_count)->capture_default_str();
  train->add_option("--iters", t_iters, "Epochs (default 5, GloVe 15)");
  train->add_option("--negative", t_base.negative)->capture_default_str();
  train->add_option("--lr", t_lr, "Initial learning rate");
  train->add_option("--subsample", t_base.subsample)->capture_default_str();
  train->add_flag("--asymmetric", t_asym, "GloVe: count left context only");
  train->add_option("--seed", t_base.seed)->capture_default_str();
  train->add_option("--workers", t_base.workers)->capture_default_str();
  train->add_option("--output", t_out, "Vector file")->required();
  train->callback([&] {
    auto cfg = TrainConfig::defaults(parse_architecture(t_arch));
    cfg.dim = t_base.dim;
    cfg.min_count = t_base.min_count;
    cfg.negative = t_base.negative;
    cfg.subsample = t_base.subsample;
    cfg.seed = t_base.seed;
    cfg.workers = t_base.workers;
    cfg.symmetric_context = !t_asym;
    if (t_window) cfg.window = *t_window;
    if (t_iters) cfg.epochs = *t_iters;
    if (t_lr) cfg.learning_rate = *t_lr;
    TrainingReport report;
    auto emb = train_embeddings(read_token_stream(t_corpus), cfg, &report);
    save_vectors(t_out, emb);
    std::cout << emb.size() << " vectors of dimension " << emb.dim();
    if (!report.epoch_loss.empty()) std::cout << ", final epoch loss " << report.epoch_loss.back();
    std::cout << "\n";
  });

  // compare-models
  auto* compare = app.add_subcommand("compare-models", "Rank vector models by cophenetic coefficient");
  std::vector<fs::path> c_vectors;
  fs::path c_items;
  std::string c_metric = "cosine", c_linkage = "average";
  compare->add_option("--vectors", c_vectors, "Vector files")->required();
  compare->add_option("--items", c_items, "Keyword list")->required();
  compare->add_option("--metric", c_metric)->capture_default_str();
  compare->add_option("--linkage", c_linkage)->capture_default_str();
  compare->callback([&] {
    std::vector<NamedModel> models;
    for (const auto& p : c_vectors) models.push_back({p.stem().string(), load_vectors(p)});
    auto cmp = compare_models(models, read_token_list(c_items), parse_metric(c_metric), parse_linkage(c_linkage));
    for (const auto& s : cmp.ranking) std::cout << s.name << "\t" << s.coefficient << "\n";
    if (!cmp.dropped.empty()) std::cerr << cmp.dropped.size() << " items without a vector in some model dropped\n";
  });

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Agglomerative clustering of keywords");
  fs::path cl_vectors, cl_items, cl_dend, cl_dist, cl_table;
  std::string cl_metric = "cosine", cl_linkage = "average";
  cluster->add_option("--vectors", cl_vectors)->required();
  cluster->add_option("--items", cl_items, "Keyword list")->required();
  cluster->add_option("--metric", cl_metric)->capture_default_str();
  cluster->add_option("--linkage", cl_linkage)->capture_default_str();
  cluster->add_option("--output-dendrogram", cl_dend)->required();
  cluster->add_option("--output-items", cl_table, "Item table (default: <dendrogram>.items.tsv)");
  cluster->add_option("--output-distances", cl_dist, "Condensed distance matrix for select-k");
  cluster->callback([&] {
    const auto emb = load_vectors(cl_vectors);
    std::vector<std::string> items;
    for (auto& t : read_token_list(cl_items)) {
      if (emb.contains(t)) items.push_back(std::move(t));
      else std::cerr << "skipping '" << t << "': no vector\n";
    }
    auto dist = pairwise_distances(emb, items, parse_metric(cl_metric));
    auto dend = agglomerate(dist, parse_linkage(cl_linkage));
    save_dendrogram(cl_dend, dend);
    save_item_table(cl_table.empty() ? sidecar(cl_dend) : cl_table, items);
    if (!cl_dist.empty()) save_distances(cl_dist, dist);
    std::cout << items.size() << " items, cophenetic coefficient " << cophenetic_correlation(dist, dend).coefficient
              << "\n";
  });

  // cut
  auto* cutc = app.add_subcommand("cut", "Cut a dendrogram into k clusters");
  fs::path cu_dend, cu_items, cu_out;
  std::size_t cu_k = 0;
  cutc->add_option("--dendrogram", cu_dend)->required();
  cutc->add_option("--items", cu_items, "Item table (default: <dendrogram>.items.tsv)");
  cutc->add_option("--k", cu_k)->required();
  cutc->add_option("--output", cu_out)->required();
  cutc->callback([&] {
    const auto dend = load_dendrogram(cu_dend);
    const auto table = cu_items.empty() ? sidecar(cu_dend) : cu_items;
    const auto items = fs::exists(table) ? load_item_table(table) : std::vector<std::string>{};
    save_assignment(cu_out, cut(dend, cu_k), items);
  });

  // select-k
  auto* selk = app.add_subcommand("select-k", "Silhouette sweep over dendrogram cuts");
  fs::path sk_dend, sk_dist, sk_out;
  std::size_t sk_min = 2, sk_max = 300, sk_workers = 1;
  selk->add_option("--dendrogram", sk_dend)->required();
  selk->add_option("--distances", sk_dist)->required();
  selk->add_option("--k-min", sk_min)->capture_default_str();
  selk->add_option("--k-max", sk_max, "Clamped to n - 1")->capture_default_str();
  selk->add_option("--workers", sk_workers)->capture_default_str();
  selk->add_option("--output", sk_out)->required();
  selk->callback([&] {
    const auto dend = load_dendrogram(sk_dend);
    const auto sweep = sweep_k(dend, load_distances(sk_dist), sk_min,
                               std::min(sk_max, dend.leaves() - 1), sk_workers);
    save_sweep(sk_out, sweep);
    std::cout << "best_k " << sweep.best_k << " average silhouette " << sweep.best_average << "\n";
  });

  // export-review
  auto* exp = app.add_subcommand("export-review", "Write the cluster review file for manual labeling");
  fs::path ex_dend, ex_assign, ex_dist, ex_items, ex_out;
  exp->add_option("--dendrogram", ex_dend)->required();
  exp->add_option("--assignment", ex_assign)->required();
  exp->add_option("--distances", ex_dist)->required();
  exp->add_option("--items", ex_items, "Item table (default: <dendrogram>.items.tsv)");
  exp->add_option("--output", ex_out)->required();
  exp->callback([&] {
    auto review = export_review(load_assignment(ex_assign), load_dendrogram(ex_dend), load_distances(ex_dist),
                                load_item_table(ex_items.empty() ? sidecar(ex_dend) : ex_items));
    save_review(ex_out, review);
  });

  // build-tree
  auto* tree = app.add_subcommand("build-tree", "Build the concept hierarchy from a labeled review");
  fs::path bt_review, bt_dend, bt_items, bt_out, bt_outline, bt_labels;
  tree->add_option("--review", bt_review)->required();
  tree->add_option("--dendrogram", bt_dend)->required();
  tree->add_option("--items", bt_items, "Item table (default: <dendrogram>.items.tsv)");
  tree->add_option("--labels", bt_labels, "Internal node labels, '<id>\\t<label>' per line");
  tree->add_option("--output", bt_out)->required();
  tree->add_option("--outline", bt_outline, "Also write an indented outline");
  tree->callback([&] {
    auto validated = import_review(load_review(bt_review));
    auto t = build_concept_tree(validated, load_dendrogram(bt_dend),
                                load_item_table(bt_items.empty() ? sidecar(bt_dend) : bt_items));
    if (!bt_labels.empty()) apply_labels(t, slurp(bt_labels));
    save_concept_tree(bt_out, t);
    if (!bt_outline.empty()) {
      std::ofstream(bt_outline) << t.outline();
    } else {
      std::cout << t.outline();
    }
  });

  // lookup
  auto* look = app.add_subcommand("lookup", "Concept path of a word in a concept tree");
  fs::path lk_tree;
  std::string lk_word;
  look->add_option("--tree", lk_tree)->required();
  look->add_option("--word", lk_word)->required();
  int lookup_status = 0;
  look->callback([&] {
    auto path = classify_lookup(load_concept_tree(lk_tree), lk_word);
    if (!path) {
      std::cout << lk_word << ": not in the hierarchy\n";
      lookup_status = 2;
      return;
    }
    for (std::size_t i = 0; i < path->size(); ++i) std::cout << (i ? " > " : "") << (*path)[i];
    std::cout << "\n";
  });

  // classify
  auto* cls = app.add_subcommand("classify", "Train, apply and evaluate word classifiers");
  cls->require_subcommand(1);
  auto* ctrain = cls->add_subcommand("train", "Train a classifier");
  std::string ct_kind = "mlp";
  fs::path ct_data, ct_tree, ct_vectors, ct_out, ct_test_out;
  double ct_fraction = 0.0;
  std::uint64_t ct_seed = 1;
  ClassifierSettings ct_settings;
  std::size_t ct_workers = 1;
  ctrain->add_option("--model", ct_kind, "mlp | knn | rf")->capture_default_str();
  ctrain->add_option("--data", ct_data, "Labeled words, '<token>\\t<label>' per line");
  ctrain->add_option("--tree", ct_tree, "Concept tree; its leaves supply the labeled words");
  ctrain->add_option("--vectors", ct_vectors)->required();
  ctrain->add_option("--output", ct_out, "Model file")->required();
  ctrain->add_option("--train-fraction", ct_fraction, "Hold out the rest, stratified (0 = train on all)");
  ctrain->add_option("--test-output", ct_test_out, "Where the held-out labeled words are written");
  ctrain->add_option("--seed", ct_seed)->capture_default_str();
  ctrain->add_option("--epochs", ct_settings.mlp.epochs)->capture_default_str();
  ctrain->add_option("--lr", ct_settings.mlp.learning_rate)->capture_default_str();
  ctrain->add_option("--batch-size", ct_settings.mlp.batch_size)->capture_default_str();
  ctrain->add_option("--k", ct_settings.knn.k)->capture_default_str();
  ctrain->add_option("--trees", ct_settings.forest.trees)->capture_default_str();
  ctrain->add_option("--workers", ct_workers)->capture_default_str();
  std::string ct_metric = "cosine";
  ctrain->add_option("--metric", ct_metric, "kNN metric")->capture_default_str();
  ctrain->callback([&] {
    if (ct_data.empty() == ct_tree.empty()) throw CLI::ValidationError("give exactly one of --data, --tree");
    const auto emb = load_vectors(ct_vectors);
    auto data = ct_data.empty() ? dataset_from_tree(load_concept_tree(ct_tree), emb)
                                : dataset_from_words(read_labeled_words(ct_data), emb);
    ct_settings.mlp.seed = ct_seed;
    ct_settings.forest.seed = ct_seed;
    ct_settings.forest.workers = ct_workers;
    ct_settings.knn.metric = parse_metric(ct_metric);
    LabeledDataset train_set = data;
    if (ct_fraction > 0.0) {
      auto parts = split(data, ct_fraction, ct_seed);
      for (const auto& w : parts.warnings) std::cerr << "warning: " << w << "\n";
      train_set = std::move(parts.train);
      if (!ct_test_out.empty()) {
        std::vector<std::pair<std::string, std::string>> words;
        for (std::size_t i = 0; i < parts.test.size(); ++i) {
          words.emplace_back(parts.test.tokens[i], parts.test.label_names[parts.test.labels[i]]);
        }
        write_labeled_words(ct_test_out, words);
      }
    }
    auto model = train_classifier(parse_classifier_kind(ct_kind), train_set, ct_settings);
    save_model(ct_out, model);
    std::cout << "trained " << to_string(model.kind()) << " on " << train_set.size() << " words, "
              << model.label_names.size() << " labels\n";
  });

  auto* cpred = cls->add_subcommand("predict", "Predict the concept of a word");
  fs::path cp_model, cp_vectors;
  std::vector<std::string> cp_words;
  cpred->add_option("--model-file", cp_model)->required();
  cpred->add_option("--word", cp_words, "Word(s) to classify")->required();
  cpred->add_option("--vectors", cp_vectors)->required();
  cpred->callback([&] {
    const auto model = load_model(cp_model);
    const auto emb = load_vectors(cp_vectors);
    for (const auto& w : cp_words) std::cout << w << "\t" << model.predict_label(emb.at(w)) << "\n";
  });

  auto* ceval = cls->add_subcommand("evaluate", "Accuracy, precision, recall and F1 on labeled words");
  std::vector<fs::path> ce_models;
  fs::path ce_data, ce_vectors;
  ceval->add_option("--model-file", ce_models, "One or more model files")->required();
  ceval->add_option("--data", ce_data, "Labeled words, '<token>\\t<label>' per line")->required();
  ceval->add_option("--vectors", ce_vectors)->required();
  ceval->callback([&] {
    const auto emb = load_vectors(ce_vectors);
    const auto words = read_labeled_words(ce_data);
    std::vector<std::pair<std::string, EvaluationReport>> rows;
    for (const auto& path : ce_models) {
      const auto model = load_model(path);
      const auto test = dataset_from_words(words, emb, &model.label_names);
      rows.emplace_back(std::string(to_string(model.kind())), evaluate(model, test));
    }
    std::cout << format_report_table(rows);
  });

  // run / resume
  fs::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  auto* run = app.add_subcommand("run", "Run the pipeline up to the manual labeling gate");
  auto* res = app.add_subcommand("resume", "Build the concept tree and classifiers from the labeled review");
  for (auto* sub : {run, res}) {
    sub->add_option("--config", config_path, "key=value pipeline config")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--workers", workers, "Override the config worker count");
  }
  run->callback([&] {
    const auto cfg = PipelineConfig::load(config_path, seed, workers);
    const auto report = run_all(cfg);
    print_run(report);
    std::cout << "best k " << report.best_k << " (average silhouette " << report.best_average << ")\n"
              << "label the clusters in " << (cfg.output_dir / "review.txt").string() << ", save the result as "
              << cfg.labeled_review.string() << " and run resume\n";
  });
  res->callback([&] {
    const auto cfg = PipelineConfig::load(config_path, seed, workers);
    print_run(resume(cfg));
    std::cout << slurp(cfg.output_dir / "evaluation.txt");
  });

  // make-fixture
  auto* fix = app.add_subcommand("make-fixture", "Write the synthetic planted-concept corpus and config");
  fs::path fx_dir;
  SyntheticConfig fx_cfg;
  fix->add_option("--dir", fx_dir)->required();
  fix->add_option("--seed", fx_cfg.seed)->capture_default_str();
  fix->add_option("--concepts", fx_cfg.concepts)->capture_default_str();
  fix->add_option("--words", fx_cfg.words_per_concept, "Words per concept")->capture_default_str();
  fix->add_option("--sentences", fx_cfg.sentences)->capture_default_str();
  fix->callback([&] {
    auto paths = write_fixture(fx_dir, fx_cfg);
    std::cout << "wrote " << paths.config.string() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return lookup_status;
}
