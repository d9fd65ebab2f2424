#include "cdisc/hierarchy.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "text_io.hpp"

namespace cdisc {

std::vector<std::string> ReviewBlock::retained() const {
  std::unordered_set<std::string_view> drop(exclusions.begin(), exclusions.end());
  std::vector<std::string> out;
  for (const auto& m : members) {
    if (!drop.count(m)) out.push_back(m);
  }
  return out;
}

std::string format_review(const ClusterReviewFile& review) {
  std::string out;
  for (std::size_t b = 0; b < review.blocks.size(); ++b) {
    const auto& block = review.blocks[b];
    if (b) out.push_back('\n');
    out += "# cluster " + std::to_string(block.cluster_id) + ":";
    if (!block.label.empty()) out += " " + block.label;
    out.push_back('\n');
    for (const auto& m : block.members) out += m + "\n";
    for (const auto& e : block.exclusions) out += "!" + e + "\n";
  }
  return out;
}

ClusterReviewFile parse_review(std::string_view text) {
  ClusterReviewFile review;
  ReviewBlock* current = nullptr;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::parse, "review line " + std::to_string(line_no) + ": " + why);
  };
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty()) {
      current = nullptr;
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view prefix = "# cluster ";
      if (line.substr(0, prefix.size()) != prefix) fail("expected '# cluster <id>: <label>'");
      auto rest = line.substr(prefix.size());
      auto colon = rest.find(':');
      if (colon == std::string_view::npos) fail("cluster header is missing ':'");
      std::size_t id = 0;
      try {
        id = detail::parse_size(detail::trim(rest.substr(0, colon)));
      } catch (const Error&) {
        fail("cluster id must be a non-negative integer");
      }
      review.blocks.push_back({id, std::string(detail::trim(rest.substr(colon + 1))), {}, {}});
      current = &review.blocks.back();
      continue;
    }
    if (!current) fail("token outside a cluster block");
    bool excluded = line.front() == '!';
    auto token = excluded ? detail::trim(line.substr(1)) : line;
    if (token.empty()) fail("empty token");
    if (detail::split_whitespace(token).size() != 1) fail("expected one token per line");
    (excluded ? current->exclusions : current->members).emplace_back(token);
  }
  return review;
}

void save_review(const std::filesystem::path& path, const ClusterReviewFile& review) {
  detail::write_file(path, format_review(review));
}

ClusterReviewFile load_review(const std::filesystem::path& path) { return parse_review(detail::read_file(path)); }

ClusterReviewFile export_review(const ClusterAssignment& assignment, const Dendrogram& dend,
                                const DistanceMatrix& dist, const std::vector<std::string>& items) {
  const std::size_t n = dend.leaves();
  if (assignment.labels.size() != n || dist.n() != n || items.size() != n) {
    throw Error(Errc::dimension_mismatch, "assignment, dendrogram, distances and items must cover the same items");
  }
  if (assignment.k < 1 || assignment.k > n || !(cut(dend, assignment.k) == assignment)) {
    throw Error(Errc::invalid_argument, "cluster assignment is not a cut of the dendrogram");
  }
  ClusterReviewFile review;
  for (std::size_t c = 0; c < assignment.k; ++c) review.blocks.push_back({c, {}, {}, {}});
  for (const auto& members : assignment.clusters()) {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i : members) {
      double sum = 0.0;
      for (std::size_t j : members) sum += dist.at(i, j);
      ranked.emplace_back(members.size() > 1 ? sum / static_cast<double>(members.size() - 1) : 0.0, i);
    }
    std::sort(ranked.begin(), ranked.end());
    auto& block = review.blocks[assignment.labels[members.front()]];
    for (const auto& [score, i] : ranked) block.members.push_back(items[i]);
  }
  return review;
}

std::vector<ReviewIssue> validate_review(const ClusterReviewFile& review) {
  std::vector<ReviewIssue> issues;
  std::unordered_map<std::string, std::size_t> owner;
  for (std::size_t b = 0; b < review.blocks.size(); ++b) {
    const auto& block = review.blocks[b];
    std::unordered_set<std::string_view> local;
    for (const auto& m : block.members) {
      auto [it, inserted] = owner.emplace(m, b);
      if (!inserted) {
        issues.push_back({Errc::duplicate_member, b,
                          "token '" + m + "' appears in cluster " + std::to_string(review.blocks[it->second].cluster_id) +
                              " and cluster " + std::to_string(block.cluster_id)});
      }
      local.insert(m);
    }
    for (const auto& e : block.exclusions) {
      if (!local.count(e)) {
        issues.push_back({Errc::unknown_exclusion, b,
                          "exclusion '!" + e + "' is not a member of cluster " + std::to_string(block.cluster_id)});
      }
    }
    if (!block.retained().empty() && block.label.empty()) {
      issues.push_back({Errc::missing_labels, b, "cluster " + std::to_string(block.cluster_id) + " has no label"});
    }
  }
  return issues;
}

ValidatedReview import_review(const ClusterReviewFile& review) {
  ValidatedReview out{review, {}};
  std::string message;
  std::optional<Errc> first;
  for (const auto& issue : validate_review(review)) {
    if (issue.code == Errc::missing_labels) {
      out.unlabeled.push_back(issue.block);
      continue;
    }
    if (!first) first = issue.code;
    if (!message.empty()) message += "; ";
    message += std::string(to_string(issue.code)) + ": " + issue.message;
  }
  if (first) throw Error(*first, message);
  return out;
}

ValidatedReview import_review(std::string_view text) { return import_review(parse_review(text)); }

ConceptTree::ConceptTree(std::vector<ConceptNode> nodes, std::size_t root) : nodes_(std::move(nodes)), root_(root) {
  const std::size_t count = nodes_.size();
  if (root_ >= count) throw Error(Errc::parse, "concept tree root out of range");
  parent_.assign(count, std::numeric_limits<std::size_t>::max());
  for (std::size_t id = 0; id < count; ++id) {
    const auto& node = nodes_[id];
    if (node.id != id) throw Error(Errc::parse, "concept node ids must equal their position");
    if (node.label.empty()) throw Error(Errc::parse, "concept node " + std::to_string(id) + " has an empty label");
    if (node.is_leaf()) {
      if (!node.children.empty()) throw Error(Errc::parse, "leaf concept " + std::to_string(id) + " has children");
      for (const auto& m : node.members) {
        if (!leaf_of_.emplace(m, id).second) {
          throw Error(Errc::parse, "token '" + m + "' belongs to two concepts");
        }
      }
    } else {
      if (node.children.empty()) {
        throw Error(Errc::parse, "internal concept " + std::to_string(id) + " has no children");
      }
      for (auto child : node.children) {
        if (child >= count || child == root_ || parent_[child] != std::numeric_limits<std::size_t>::max()) {
          throw Error(Errc::parse, "concept " + std::to_string(child) + " has an invalid parent link");
        }
        parent_[child] = id;
      }
    }
  }
  // Every node must hang off the root.
  for (std::size_t id = 0; id < count; ++id) {
    std::size_t v = id, steps = 0;
    while (v != root_) {
      v = parent_[v];
      if (v == std::numeric_limits<std::size_t>::max() || ++steps > count) {
        throw Error(Errc::parse, "concept " + std::to_string(id) + " is not connected to the root");
      }
    }
  }
}

std::vector<std::size_t> ConceptTree::leaves() const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) out.push_back(n.id);
  }
  return out;
}

std::optional<std::vector<std::string>> ConceptTree::lookup(std::string_view token) const {
  auto it = leaf_of_.find(std::string(token));
  if (it == leaf_of_.end()) return std::nullopt;
  std::vector<std::string> path;
  for (std::size_t v = it->second;; v = parent_[v]) {
    path.push_back(nodes_[v].label);
    if (v == root_) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void ConceptTree::relabel(std::size_t id, std::string label) {
  if (id >= nodes_.size()) throw Error(Errc::invalid_argument, "no concept node " + std::to_string(id));
  if (label.empty()) throw Error(Errc::invalid_argument, "concept labels must be non-empty");
  nodes_[id].label = std::move(label);
}

std::string ConceptTree::outline() const {
  std::string out;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t id, std::size_t depth) {
    const auto& node = nodes_[id];
    out += std::string(2 * depth, ' ') + node.label;
    if (node.is_leaf()) {
      out += " (" + std::to_string(node.members.size()) + "):";
      for (const auto& m : node.members) out += " " + m;
    }
    out.push_back('\n');
    for (auto child : node.children) visit(child, depth + 1);
  };
  if (!nodes_.empty()) visit(root_, 0);
  return out;
}

ConceptTree build_concept_tree(const ValidatedReview& review, const Dendrogram& dend,
                               const std::vector<std::string>& items) {
  if (!review.unlabeled.empty()) {
    std::string names;
    for (auto b : review.unlabeled) {
      if (!names.empty()) names += ", ";
      names += std::to_string(review.file.blocks[b].cluster_id);
    }
    throw Error(Errc::missing_labels, "clusters without labels: " + names);
  }
  const std::size_t n = dend.leaves();
  if (items.size() != n) throw Error(Errc::dimension_mismatch, "item table does not match the dendrogram");
  std::unordered_map<std::string_view, std::size_t> item_id;
  for (std::size_t i = 0; i < n; ++i) item_id.emplace(items[i], i);

  // Parent links over dendrogram nodes, for lowest common ancestors.
  const std::size_t total = 2 * n - 1;
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(total, none), depth(total, 0);
  const auto& merges = dend.merges();
  for (std::size_t m = 0; m < merges.size(); ++m) {
    parent[merges[m].left] = parent[merges[m].right] = n + m;
  }
  for (std::size_t v = total; v-- > 0;) {
    if (parent[v] != none) depth[v] = depth[parent[v]] + 1;
  }
  auto lca = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      a = parent[a];
    }
    return a;
  };

  std::vector<ConceptNode> nodes;
  std::vector<std::vector<std::size_t>> attached(total);
  for (const auto& block : review.file.blocks) {
    auto kept = block.retained();
    if (kept.empty()) continue;
    std::size_t anchor = none;
    for (const auto& token : kept) {
      auto it = item_id.find(token);
      if (it == item_id.end()) throw Error(Errc::unknown_token, "review token '" + token + "' is not a clustered item");
      anchor = anchor == none ? it->second : lca(anchor, it->second);
    }
    ConceptNode leaf;
    leaf.id = nodes.size();
    leaf.label = block.label;
    leaf.cluster_id = block.cluster_id;
    leaf.members = std::move(kept);
    leaf.excluded = block.exclusions;
    attached[anchor].push_back(leaf.id);
    nodes.push_back(std::move(leaf));
  }
  if (nodes.empty()) throw Error(Errc::empty_tree, "every reviewed token was excluded");

  auto make_internal = [&](std::vector<std::size_t> children) {
    ConceptNode node;
    node.id = nodes.size();
    node.label = "node-" + std::to_string(node.id);
    node.children = std::move(children);
    nodes.push_back(std::move(node));
    return nodes.back().id;
  };
  // rep[v]: the concept standing for dendrogram node v, if any.
  std::vector<std::size_t> rep(total, none);
  auto combine = [&](std::vector<std::size_t> parts) {
    if (parts.empty()) return none;
    if (parts.size() == 1) return parts.front();
    return make_internal(std::move(parts));
  };
  for (std::size_t v = 0; v < n; ++v) rep[v] = combine(attached[v]);
  for (std::size_t m = 0; m < merges.size(); ++m) {
    std::vector<std::size_t> parts;
    if (rep[merges[m].left] != none) parts.push_back(rep[merges[m].left]);
    if (rep[merges[m].right] != none) parts.push_back(rep[merges[m].right]);
    parts.insert(parts.end(), attached[n + m].begin(), attached[n + m].end());
    rep[n + m] = combine(std::move(parts));
  }
  std::size_t root = rep[dend.root()];
  if (nodes[root].is_leaf()) root = make_internal({root});
  return ConceptTree(std::move(nodes), root);
}

std::optional<std::vector<std::string>> classify_lookup(const ConceptTree& tree, std::string_view token) {
  return tree.lookup(token);
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json node_to_json(const ConceptTree& tree, std::size_t id) {
  const auto& node = tree.node(id);
  ordered_json j;
  j["id"] = node.id;
  j["label"] = node.label;
  if (node.is_leaf()) {
    j["cluster"] = *node.cluster_id;
    j["members"] = node.members;
    j["excluded"] = node.excluded;
  } else {
    ordered_json children = ordered_json::array();
    for (auto child : node.children) children.push_back(node_to_json(tree, child));
    j["children"] = std::move(children);
  }
  return j;
}

void node_from_json(const nlohmann::json& j, std::vector<ConceptNode>& nodes) {
  ConceptNode node;
  node.id = j.at("id").get<std::size_t>();
  node.label = j.at("label").get<std::string>();
  if (j.contains("children")) {
    for (const auto& child : j.at("children")) {
      node.children.push_back(child.at("id").get<std::size_t>());
      node_from_json(child, nodes);
    }
  } else {
    node.cluster_id = j.at("cluster").get<std::size_t>();
    node.members = j.at("members").get<std::vector<std::string>>();
    if (j.contains("excluded")) node.excluded = j.at("excluded").get<std::vector<std::string>>();
  }
  if (node.id >= nodes.size()) nodes.resize(node.id + 1);
  nodes[node.id] = std::move(node);
}

}  // namespace

std::string format_concept_tree(const ConceptTree& tree) {
  ordered_json doc;
  doc["root"] = tree.root();
  doc["nodes"] = tree.nodes().size();
  doc["tree"] = node_to_json(tree, tree.root());
  return doc.dump(2) + "\n";
}

ConceptTree parse_concept_tree(std::string_view text) {
  try {
    auto doc = nlohmann::json::parse(text);
    std::vector<ConceptNode> nodes(doc.at("nodes").get<std::size_t>());
    node_from_json(doc.at("tree"), nodes);
    return ConceptTree(std::move(nodes), doc.at("root").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("concept tree: ") + e.what());
  }
}

void save_concept_tree(const std::filesystem::path& path, const ConceptTree& tree) {
  detail::write_file(path, format_concept_tree(tree));
}

ConceptTree load_concept_tree(const std::filesystem::path& path) { return parse_concept_tree(detail::read_file(path)); }

void apply_labels(ConceptTree& tree, std::string_view text) {
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) {
      throw Error(Errc::parse, "labels line " + std::to_string(line_no) + ": expected '<id>\\t<label>'");
    }
    tree.relabel(detail::parse_size(line.substr(0, sep)), std::string(detail::trim(line.substr(sep + 1))));
  }
}

}  // namespace cdisc
