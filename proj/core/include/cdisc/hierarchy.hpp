#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdisc/clustering.hpp"
#include "cdisc/error.hpp"

namespace cdisc {

// One cluster as presented for manual review. `exclusions` name members that
// the reviewer removed from the concept.
struct ReviewBlock {
  std::size_t cluster_id = 0;
  std::string label;
  std::vector<std::string> members;
  std::vector<std::string> exclusions;

  // Members that are not excluded.
  std::vector<std::string> retained() const;
  friend bool operator==(const ReviewBlock&, const ReviewBlock&) = default;
};

// Text syntax:
//
//   # cluster 3: Types of coffee
//   latte
//   espresso
//   !coffeehouse
//
// A header opens a block, one member token per line follows, a `!` line
// excludes a member listed in the same block, blank lines separate blocks.
struct ClusterReviewFile {
  std::vector<ReviewBlock> blocks;
  friend bool operator==(const ClusterReviewFile&, const ClusterReviewFile&) = default;
};

std::string format_review(const ClusterReviewFile& review);
// Throws Errc::parse naming the offending line.
ClusterReviewFile parse_review(std::string_view text);
void save_review(const std::filesystem::path& path, const ClusterReviewFile& review);
ClusterReviewFile load_review(const std::filesystem::path& path);

// One block per cluster, members ordered by mean distance to the rest of
// their cluster (closest to the centre first, ties by item id). Labels are
// blank. Throws Errc::invalid_argument when the assignment is not a cut of
// the dendrogram.
ClusterReviewFile export_review(const ClusterAssignment& assignment, const Dendrogram& dend,
                                const DistanceMatrix& dist, const std::vector<std::string>& items);

struct ReviewIssue {
  Errc code;
  std::size_t block = 0;
  std::string message;
};

// Every problem in the file: duplicate_member, unknown_exclusion and
// missing_labels (retained block without a label).
std::vector<ReviewIssue> validate_review(const ClusterReviewFile& review);

struct ValidatedReview {
  ClusterReviewFile file;
  // Retained blocks that still need a label before a tree can be built.
  std::vector<std::size_t> unlabeled;
};

// Throws the first structural issue (duplicate_member, unknown_exclusion)
// with all structural issues listed in the message. Missing labels are
// reported in `unlabeled` and rejected later by build_concept_tree.
ValidatedReview import_review(const ClusterReviewFile& review);
ValidatedReview import_review(std::string_view text);

struct ConceptNode {
  std::size_t id = 0;
  std::string label;
  std::vector<std::size_t> children;
  // Leaves only.
  std::optional<std::size_t> cluster_id;
  std::vector<std::string> members;
  std::vector<std::string> excluded;

  bool is_leaf() const { return cluster_id.has_value(); }
  friend bool operator==(const ConceptNode&, const ConceptNode&) = default;
};

class ConceptTree {
 public:
  ConceptTree() = default;
  // Validates tree shape, member disjointness and non-empty labels; throws
  // Errc::parse on violation.
  ConceptTree(std::vector<ConceptNode> nodes, std::size_t root);

  const std::vector<ConceptNode>& nodes() const { return nodes_; }
  const ConceptNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t root() const { return root_; }
  std::vector<std::size_t> leaves() const;

  // Labels from the root down to the leaf holding `token`.
  std::optional<std::vector<std::string>> lookup(std::string_view token) const;

  void relabel(std::size_t id, std::string label);

  // Indented outline, two spaces per level; leaves list their members.
  std::string outline() const;

  friend bool operator==(const ConceptTree& a, const ConceptTree& b) {
    return a.root_ == b.root_ && a.nodes_ == b.nodes_;
  }

 private:
  std::vector<ConceptNode> nodes_;
  std::size_t root_ = 0;
  std::unordered_map<std::string, std::size_t> leaf_of_;
  std::vector<std::size_t> parent_;
};

// Leaves are the labeled blocks minus exclusions; internal nodes follow the
// dendrogram's merge order restricted to those leaves. Blocks whose members
// are all excluded are dropped. Throws Errc::missing_labels,
// Errc::unknown_token (member not in `items`), Errc::empty_tree.
ConceptTree build_concept_tree(const ValidatedReview& review, const Dendrogram& dend,
                               const std::vector<std::string>& items);

std::optional<std::vector<std::string>> classify_lookup(const ConceptTree& tree, std::string_view token);

std::string format_concept_tree(const ConceptTree& tree);
ConceptTree parse_concept_tree(std::string_view text);
void save_concept_tree(const std::filesystem::path& path, const ConceptTree& tree);
ConceptTree load_concept_tree(const std::filesystem::path& path);

// "<node id>\t<label>" per line.
void apply_labels(ConceptTree& tree, std::string_view text);

}  // namespace cdisc
