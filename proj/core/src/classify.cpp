#include "cdisc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

#include "cdisc/error.hpp"
#include "rng.hpp"
#include "text_io.hpp"

namespace cdisc {

void LabeledDataset::add(std::span<const double> vector, std::size_t label, std::string token) {
  if (vector.size() != dim) throw Error(Errc::dimension_mismatch, "example dimension does not match dataset");
  if (label >= label_names.size()) throw Error(Errc::invalid_argument, "label id out of range");
  features.insert(features.end(), vector.begin(), vector.end());
  labels.push_back(label);
  tokens.push_back(std::move(token));
}

LabeledDataset LabeledDataset::empty_like() const {
  LabeledDataset out;
  out.dim = dim;
  out.label_names = label_names;
  return out;
}

LabeledDataset dataset_from_tree(const ConceptTree& tree, const EmbeddingMatrix& emb) {
  LabeledDataset data;
  data.dim = emb.dim();
  for (auto leaf : tree.leaves()) {
    const auto& node = tree.node(leaf);
    const std::size_t label = data.label_names.size();
    data.label_names.push_back(node.label);
    for (const auto& m : node.members) {
      if (auto idx = emb.index_of(m)) data.add(emb.row(*idx), label, m);
    }
  }
  return data;
}

std::vector<std::pair<std::string, std::string>> read_labeled_words(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  auto text = detail::read_file(path);
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(Errc::parse, "labeled words line " + std::to_string(line_no) + ": expected '<token>\\t<label>'");
    }
    out.emplace_back(std::string(detail::trim(line.substr(0, tab))), std::string(detail::trim(line.substr(tab + 1))));
  }
  return out;
}

void write_labeled_words(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::string>>& words) {
  std::string out;
  for (const auto& [token, label] : words) out += token + "\t" + label + "\n";
  detail::write_file(path, out);
}

LabeledDataset dataset_from_words(const std::vector<std::pair<std::string, std::string>>& words,
                                  const EmbeddingMatrix& emb, const std::vector<std::string>* label_names) {
  LabeledDataset data;
  data.dim = emb.dim();
  std::unordered_map<std::string, std::size_t> ids;
  if (label_names) {
    data.label_names = *label_names;
    for (std::size_t i = 0; i < label_names->size(); ++i) ids.emplace((*label_names)[i], i);
  }
  for (const auto& [token, label] : words) {
    auto it = ids.find(label);
    if (it == ids.end()) {
      if (label_names) throw Error(Errc::invalid_argument, "label '" + label + "' is not known to the model");
      it = ids.emplace(label, data.label_names.size()).first;
      data.label_names.push_back(label);
    }
    if (auto idx = emb.index_of(token)) data.add(emb.row(*idx), it->second, token);
  }
  return data;
}

SplitResult split(const LabeledDataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(Errc::invalid_argument, "train fraction must lie in (0, 1)");
  }
  struct Group {
    std::vector<std::size_t> rows;
    std::size_t take = 0;
    double remainder = 0.0;
    std::size_t lo = 0, hi = 0;
  };
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < data.size(); ++i) by_label[data.labels[i]].push_back(i);

  SplitResult result{data.empty_like(), data.empty_like(), {}};
  std::vector<Group> groups;
  Group pooled;
  for (auto& [label, rows] : by_label) {
    if (rows.size() < 2) {
      result.warnings.push_back("ClassTooSmall: class '" + data.label_names[label] +
                                "' has one example; split unstratified");
      pooled.rows.insert(pooled.rows.end(), rows.begin(), rows.end());
      continue;
    }
    Group g;
    g.rows = std::move(rows);
    g.lo = 1;
    g.hi = g.rows.size() - 1;
    groups.push_back(std::move(g));
  }
  if (!pooled.rows.empty()) {
    std::sort(pooled.rows.begin(), pooled.rows.end());
    pooled.lo = 0;
    pooled.hi = pooled.rows.size();
    groups.push_back(std::move(pooled));
  }

  const auto target = static_cast<std::ptrdiff_t>(std::llround(train_fraction * static_cast<double>(data.size())));
  std::ptrdiff_t assigned = 0;
  for (auto& g : groups) {
    const double quota = train_fraction * static_cast<double>(g.rows.size());
    const double base = std::floor(quota);
    g.take = std::clamp(static_cast<std::size_t>(base), g.lo, g.hi);
    g.remainder = quota - base;
    assigned += static_cast<std::ptrdiff_t>(g.take);
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return groups[a].remainder > groups[b].remainder; });
  for (bool progress = true; assigned < target && progress;) {
    progress = false;
    for (auto gi : order) {
      if (assigned >= target) break;
      if (groups[gi].take < groups[gi].hi) {
        ++groups[gi].take;
        ++assigned;
        progress = true;
      }
    }
  }
  for (bool progress = true; assigned > target && progress;) {
    progress = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (assigned <= target) break;
      if (groups[*it].take > groups[*it].lo) {
        --groups[*it].take;
        --assigned;
        progress = true;
      }
    }
  }

  detail::Rng rng(detail::derive_seed(seed, 0x5b1d));
  std::vector<std::size_t> train_rows, test_rows;
  for (auto& g : groups) {
    detail::shuffle(g.rows.begin(), g.rows.end(), rng);
    train_rows.insert(train_rows.end(), g.rows.begin(), g.rows.begin() + static_cast<std::ptrdiff_t>(g.take));
    test_rows.insert(test_rows.end(), g.rows.begin() + static_cast<std::ptrdiff_t>(g.take), g.rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  for (auto i : train_rows) result.train.add(data.row(i), data.labels[i], data.tokens[i]);
  for (auto i : test_rows) result.test.add(data.row(i), data.labels[i], data.tokens[i]);
  return result;
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::mlp: return "mlp";
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::random_forest: return "rf";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "mlp" || name == "ann") return ClassifierKind::mlp;
  if (name == "knn") return ClassifierKind::knn;
  if (name == "rf" || name == "random_forest" || name == "forest") return ClassifierKind::random_forest;
  throw Error(Errc::invalid_argument, "unknown classifier '" + std::string(name) + "'");
}

std::size_t ClassifierModel::predict(std::span<const double> x) const {
  if (x.size() != dim) throw Error(Errc::dimension_mismatch, "query vector has the wrong dimension");
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

ClassifierModel train_classifier(ClassifierKind kind, const LabeledDataset& train, const ClassifierSettings& settings) {
  if (train.empty()) throw Error(Errc::empty_dataset, "training set is empty");
  ClassifierModel out;
  out.label_names = train.label_names;
  out.dim = train.dim;
  switch (kind) {
    case ClassifierKind::mlp: out.model = train_mlp(train, settings.mlp); break;
    case ClassifierKind::knn: out.model = train_knn(train, settings.knn); break;
    case ClassifierKind::random_forest: out.model = train_random_forest(train, settings.forest); break;
  }
  return out;
}

EvaluationReport evaluate_predictions(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                      std::size_t num_labels) {
  if (truth.empty()) throw Error(Errc::empty_dataset, "nothing to evaluate");
  if (truth.size() != predicted.size()) throw Error(Errc::dimension_mismatch, "truth and predictions differ in length");
  EvaluationReport report;
  report.confusion.assign(num_labels, std::vector<std::size_t>(num_labels, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_labels || predicted[i] >= num_labels) {
      throw Error(Errc::invalid_argument, "label id out of range");
    }
    ++report.confusion[truth[i]][predicted[i]];
    if (truth[i] == predicted[i]) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (std::size_t c = 0; c < num_labels; ++c) {
    std::size_t tp = report.confusion[c][c], row = 0, col = 0;
    for (std::size_t o = 0; o < num_labels; ++o) {
      row += report.confusion[c][o];
      col += report.confusion[o][c];
    }
    if (row == 0 && col == 0) continue;
    ClassMetrics m;
    m.label = c;
    m.support = row;
    m.precision = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    m.recall = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    report.per_class.push_back(m);
  }
  for (const auto& m : report.per_class) {
    report.precision += m.precision;
    report.recall += m.recall;
    report.f1 += m.f1;
  }
  const auto classes = static_cast<double>(report.per_class.size());
  report.precision /= classes;
  report.recall /= classes;
  report.f1 /= classes;
  return report;
}

EvaluationReport evaluate(const ClassifierModel& model, const LabeledDataset& test) {
  if (test.empty()) throw Error(Errc::empty_dataset, "test set is empty");
  std::unordered_map<std::string, std::size_t> model_ids;
  for (std::size_t i = 0; i < model.label_names.size(); ++i) model_ids.emplace(model.label_names[i], i);
  std::vector<std::size_t> truth, predicted;
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto it = model_ids.find(test.label_names.at(test.labels[i]));
    if (it == model_ids.end()) {
      throw Error(Errc::invalid_argument, "test label '" + test.label_names[test.labels[i]] + "' unknown to the model");
    }
    truth.push_back(it->second);
    predicted.push_back(model.predict(test.row(i)));
  }
  return evaluate_predictions(truth, predicted, model.label_names.size());
}

std::string format_report_table(const std::vector<std::pair<std::string, EvaluationReport>>& rows) {
  std::size_t width = std::string_view("Classifier").size();
  for (const auto& [name, r] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %8s  %9s  %6s  %8s\n", static_cast<int>(width), "Classifier", "Accuracy",
                "Precision", "Recall", "F1 Score");
  out += buf;
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %8.2f  %9.2f  %6.2f  %8.2f\n", static_cast<int>(width), name.c_str(),
                  r.accuracy, r.precision, r.recall, r.f1);
    out += buf;
  }
  return out;
}

}  // namespace cdisc
