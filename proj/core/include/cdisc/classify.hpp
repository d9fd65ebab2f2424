#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cdisc/clustering.hpp"
#include "cdisc/embedding_matrix.hpp"
#include "cdisc/hierarchy.hpp"

namespace cdisc {

// Row-major feature vectors with integer labels indexing label_names.
struct LabeledDataset {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<std::size_t> labels;
  std::vector<std::string> label_names;
  std::vector<std::string> tokens;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
  void add(std::span<const double> vector, std::size_t label, std::string token = {});
  // Same dim and label set, no rows.
  LabeledDataset empty_like() const;
};

// One class per leaf concept; members without a vector are skipped.
LabeledDataset dataset_from_tree(const ConceptTree& tree, const EmbeddingMatrix& emb);

// "<token>\t<label>" lines. Label ids follow first appearance.
std::vector<std::pair<std::string, std::string>> read_labeled_words(const std::filesystem::path& path);
void write_labeled_words(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, std::string>>& words);
// Tokens without a vector are skipped. When `label_names` is given the
// labels are mapped onto it and an unknown label throws
// Errc::invalid_argument.
LabeledDataset dataset_from_words(const std::vector<std::pair<std::string, std::string>>& words,
                                  const EmbeddingMatrix& emb,
                                  const std::vector<std::string>* label_names = nullptr);

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
  // One entry per class too small to stratify.
  std::vector<std::string> warnings;
};

// Stratified by label: each class contributes its share of round(f * N)
// training rows by largest remainder, keeping at least one row on each side
// when the class has two or more. Single-example classes are pooled and
// split unstratified. Deterministic for a given seed.
SplitResult split(const LabeledDataset& data, double train_fraction, std::uint64_t seed);

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  // outputs x inputs, row-major.
  std::vector<double> weights;
  std::vector<double> bias;
};

struct MlpConfig {
  std::vector<std::size_t> hidden{300, 300};
  std::size_t epochs = 200;
  double learning_rate = 0.05;
  // 0 means full-batch gradient descent.
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

// Feed-forward network: ReLU hidden layers, softmax output, trained on mean
// cross-entropy.
class MlpClassifier {
 public:
  MlpClassifier() = default;
  // He-initialised weights, zero biases.
  MlpClassifier(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t classes,
                std::uint64_t seed);
  explicit MlpClassifier(std::vector<DenseLayer> layers);

  std::size_t input_dim() const { return layers_.front().inputs; }
  std::size_t classes() const { return layers_.back().outputs; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  std::vector<double> predict_proba(std::span<const double> x) const;
  std::size_t predict(std::span<const double> x) const;

  // Mean cross-entropy over `rows` of `data`.
  double loss(const LabeledDataset& data, std::span<const std::size_t> rows) const;
  // Same loss; the gradient for every parameter is written to `grad`
  // (resized to the layer shapes).
  double loss_and_gradient(const LabeledDataset& data, std::span<const std::size_t> rows,
                           std::vector<DenseLayer>& grad) const;

 private:
  std::vector<DenseLayer> layers_;
};

// Throws Errc::empty_dataset. `epoch_loss` receives the full-data loss after
// each epoch.
MlpClassifier train_mlp(const LabeledDataset& train, const MlpConfig& cfg,
                        std::vector<double>* epoch_loss = nullptr);

struct KnnConfig {
  std::size_t k = 5;
  Metric metric = Metric::cosine;
};

// Majority vote among the k nearest training rows; ties go to the smaller
// summed distance, then to the smaller label id.
class KnnClassifier {
 public:
  KnnClassifier() = default;
  KnnClassifier(LabeledDataset train, KnnConfig cfg);

  const KnnConfig& config() const { return cfg_; }
  const LabeledDataset& training_set() const { return train_; }
  std::size_t predict(std::span<const double> x) const;

 private:
  LabeledDataset train_;
  KnnConfig cfg_;
};

// Throws Errc::k_exceeds_data when k > |train| and Errc::empty_dataset.
KnnClassifier train_knn(const LabeledDataset& train, const KnnConfig& cfg = {});

struct ForestConfig {
  std::size_t trees = 100;
  // Features tried per split; 0 means ceil(sqrt(dim)).
  std::size_t max_features = 0;
  std::size_t min_samples_split = 2;
  // 0 means unlimited.
  std::size_t max_depth = 0;
  bool bootstrap = true;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct TreeNode {
  // -1 marks a leaf.
  std::int64_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::size_t label = 0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// CART tree on Gini impurity; x[feature] <= threshold goes left.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t predict(std::span<const double> x) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

class RandomForest {
 public:
  RandomForest() = default;
  RandomForest(std::vector<DecisionTree> trees, std::size_t classes, ForestConfig cfg)
      : trees_(std::move(trees)), classes_(classes), cfg_(cfg) {}

  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::size_t classes() const { return classes_; }
  const ForestConfig& config() const { return cfg_; }
  // Majority vote; ties go to the smaller label id.
  std::size_t predict(std::span<const double> x) const;

 private:
  std::vector<DecisionTree> trees_;
  std::size_t classes_ = 0;
  ForestConfig cfg_;
};

// Throws Errc::empty_dataset.
RandomForest train_random_forest(const LabeledDataset& train, const ForestConfig& cfg = {});

enum class ClassifierKind { mlp, knn, random_forest };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

struct ClassifierModel {
  std::vector<std::string> label_names;
  std::size_t dim = 0;
  std::variant<MlpClassifier, KnnClassifier, RandomForest> model;

  ClassifierKind kind() const { return static_cast<ClassifierKind>(model.index()); }
  std::size_t predict(std::span<const double> x) const;
  const std::string& predict_label(std::span<const double> x) const { return label_names.at(predict(x)); }
};

struct ClassifierSettings {
  MlpConfig mlp;
  KnnConfig knn;
  ForestConfig forest;
};

ClassifierModel train_classifier(ClassifierKind kind, const LabeledDataset& train,
                                 const ClassifierSettings& settings = {});

// Self-describing JSON: kind, hyperparameters, label names, parameters.
std::string format_model(const ClassifierModel& model);
ClassifierModel parse_model(std::string_view text);
void save_model(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_model(const std::filesystem::path& path);

struct ClassMetrics {
  std::size_t label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  double accuracy = 0.0;
  // Unweighted means over the labels that occur in truth or predictions.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  // confusion[truth][predicted]
  std::vector<std::vector<std::size_t>> confusion;
};

// Undefined ratios (no predictions / no support) count as 0.
EvaluationReport evaluate_predictions(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                      std::size_t num_labels);

// Test labels are matched to the model's labels by name. Throws
// Errc::empty_dataset and Errc::invalid_argument for unknown labels.
EvaluationReport evaluate(const ClassifierModel& model, const LabeledDataset& test);

// Classifier | Accuracy | Precision | Recall | F1 Score, two decimals.
std::string format_report_table(const std::vector<std::pair<std::string, EvaluationReport>>& rows);

}  // namespace cdisc
