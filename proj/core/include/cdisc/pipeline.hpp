#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cdisc/classify.hpp"
#include "cdisc/clustering.hpp"
#include "cdisc/config.hpp"
#include "cdisc/embedding.hpp"
#include "cdisc/vocab.hpp"

namespace cdisc {

struct PipelineConfig {
  std::filesystem::path corpus;
  // Empty paths select the built-in data.
  std::filesystem::path stopwords;
  std::filesystem::path lemma_exceptions;
  std::filesystem::path noun_lexicon;
  std::filesystem::path output_dir;
  // The hand-labeled copy of review.txt read by resume.
  std::filesystem::path labeled_review;

  std::size_t top_k = 10000;
  bool unknown_is_noun = true;
  // An empty candidate list skips the candidate filter.
  CandidateFilterConfig candidates;

  // Expanded embedding grid, one entry per model.
  std::vector<TrainConfig> grid;
  Metric metric = Metric::cosine;
  Linkage linkage = Linkage::average;
  std::size_t k_min = 2;
  // 0 means default_k_max(n).
  std::size_t k_max = 0;

  std::vector<ClassifierKind> classifiers{ClassifierKind::mlp, ClassifierKind::knn, ClassifierKind::random_forest};
  double train_fraction = 0.8;
  ClassifierSettings classifier_settings;

  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // Relative paths resolve against base_dir. Seed and worker overrides
  // replace the config values everywhere they are used.
  static PipelineConfig from_config(const Config& cfg, const std::filesystem::path& base_dir,
                                    std::optional<std::uint64_t> seed = {}, std::optional<std::size_t> workers = {});
  static PipelineConfig load(const std::filesystem::path& path, std::optional<std::uint64_t> seed = {},
                             std::optional<std::size_t> workers = {});

  // Checks that every input path exists. Throws Errc::config.
  void validate() const;
};

// Every key understood by PipelineConfig::from_config.
const std::set<std::string>& pipeline_config_keys();

// Name used for a grid model's vector file, e.g. "skipgram-d300-w5-m5-e5".
std::string model_name(const TrainConfig& cfg);

std::string sha256_hex(std::string_view data);

struct StageRecord {
  std::string stage;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> parameters;
  // Paths relative to the output directory -> content hash.
  std::map<std::string, std::string> outputs;

  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

struct Manifest {
  std::vector<StageRecord> stages;

  const StageRecord* find(std::string_view stage) const;
  void upsert(StageRecord record);
};

std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

struct StageOutcome {
  std::string stage;
  bool cached = false;
};

struct RunReport {
  std::vector<StageOutcome> stages;
  std::string winner;
  std::vector<ModelScore> ranking;
  std::size_t best_k = 0;
  double best_average = 0.0;
  std::vector<std::pair<std::string, EvaluationReport>> evaluations;
};

inline constexpr std::string_view kManifestFile = "manifest.json";

// preprocess -> extract-nouns -> train-embeddings -> compare-models ->
// cluster -> select-k -> cut -> export-review, stopping at the manual
// labeling gate. Stages whose inputs and parameters match the manifest and
// whose outputs are intact are skipped. Failures are rethrown as
// Errc::stage_failed naming the stage; finished stages stay on disk.
RunReport run_all(const PipelineConfig& cfg);

// build-tree -> classify from the labeled review. Requires a completed run.
RunReport resume(const PipelineConfig& cfg);

}  // namespace cdisc
