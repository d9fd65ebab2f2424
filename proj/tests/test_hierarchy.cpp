#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "cdisc/error.hpp"
#include "cdisc/hierarchy.hpp"
#include "oracles.hpp"

using namespace cdisc;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::stage_failed;
}

struct Fixture {
  std::vector<std::string> items;
  DistanceMatrix dist;
  Dendrogram dend;
};

Fixture line(const std::vector<double>& xs) {
  Fixture f;
  std::vector<double> v;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    f.items.push_back("w" + std::to_string(i));
    for (std::size_t j = i + 1; j < xs.size(); ++j) v.push_back(std::abs(xs[i] - xs[j]));
  }
  f.dist = DistanceMatrix(xs.size(), v, Metric::euclidean);
  f.dend = agglomerate(f.dist, Linkage::average);
  return f;
}

ClusterReviewFile labeled(ClusterReviewFile review) {
  for (auto& b : review.blocks) b.label = "C" + std::to_string(b.cluster_id);
  return review;
}

const ConceptNode* by_label(const ConceptTree& t, std::string_view label) {
  for (const auto& n : t.nodes()) {
    if (n.label == label) return &n;
  }
  return nullptr;
}

std::set<std::string> leaf_labels(const ConceptTree& t, std::size_t id) {
  const auto& n = t.node(id);
  if (n.is_leaf()) return {n.label};
  std::set<std::string> out;
  for (auto c : n.children) {
    auto sub = leaf_labels(t, c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

}  // namespace

TEST(ReviewFile, FormatParseRoundTrip) {
  ClusterReviewFile review{{{3, "Types of coffee", {"latte", "espresso", "coffeehouse"}, {"coffeehouse"}},
                            {7, "", {"fork", "spoon"}, {}}}};
  const auto text = format_review(review);
  EXPECT_EQ(text.substr(0, 28), "# cluster 3: Types of coffee");
  EXPECT_NE(text.find("!coffeehouse"), std::string::npos);
  EXPECT_EQ(parse_review(text), review);
  EXPECT_EQ(format_review(parse_review(text)), text);
  EXPECT_EQ(review.blocks[0].retained(), (std::vector<std::string>{"latte", "espresso"}));
}

TEST(ReviewFile, ParseErrorsNameTheLine) {
  try {
    parse_review("# cluster 0: a\nx\n\norphan\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_review("# cluster x: a\n"); }), Errc::parse);
}

TEST(ExportReview, Examples) {
  const auto f = line({0, 1, 10});
  const auto one = export_review(cut(f.dend, 1), f.dend, f.dist, f.items);
  ASSERT_EQ(one.blocks.size(), 1u);
  EXPECT_EQ(one.blocks[0].members.size(), 3u);
  const auto two = export_review(cut(f.dend, 2), f.dend, f.dist, f.items);
  ASSERT_EQ(two.blocks.size(), 2u);
  EXPECT_EQ(two.blocks[0].members, (std::vector<std::string>{"w0", "w1"}));
  EXPECT_EQ(two.blocks[1].members, (std::vector<std::string>{"w2"}));
  EXPECT_TRUE(two.blocks[0].label.empty());
  EXPECT_TRUE(two.blocks[0].exclusions.empty());
  // Not a cut of this dendrogram.
  EXPECT_EQ(code_of([&] { export_review({2, {0, 1, 0}}, f.dend, f.dist, f.items); }), Errc::invalid_argument);
}

TEST(ExportReview, CentralMembersFirst) {
  const auto f = line({0, 1, 2, 3, 100});
  const auto review = export_review(cut(f.dend, 2), f.dend, f.dist, f.items);
  // Mean in-cluster distance: w1, w2 = 4/3; w0, w3 = 2.
  EXPECT_EQ(review.blocks[0].members, (std::vector<std::string>{"w1", "w2", "w0", "w3"}));
}

TEST(ImportReview, Issues) {
  EXPECT_NO_THROW(import_review(ClusterReviewFile{{{0, "a", {"x"}, {}}}}));
  try {
    import_review(ClusterReviewFile{{{0, "a", {"x", "y"}, {}}, {1, "b", {"y"}, {}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_member);
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { import_review("# cluster 0: a\nx\n!word\n"); }), Errc::unknown_exclusion);
  const auto v = import_review(ClusterReviewFile{{{0, "", {"x"}, {}}, {1, "", {"y"}, {"y"}}, {2, "c", {"z"}, {}}}});
  // Fully excluded blocks need no label.
  EXPECT_EQ(v.unlabeled, std::vector<std::size_t>{0});
  const auto issues = validate_review(ClusterReviewFile{{{0, "", {"x", "x"}, {"q"}}}});
  EXPECT_EQ(issues.size(), 3u);
}

TEST(BuildConceptTree, UnlabeledExportFails) {
  const auto f = line({0, 1, 10});
  const auto review = export_review(cut(f.dend, 2), f.dend, f.dist, f.items);
  const auto reparsed = import_review(format_review(review));
  EXPECT_EQ(code_of([&] { build_concept_tree(reparsed, f.dend, f.items); }), Errc::missing_labels);
}

TEST(BuildConceptTree, TwoClusters) {
  const auto f = line({0, 1, 10});
  const auto tree = build_concept_tree(import_review(labeled(export_review(cut(f.dend, 2), f.dend, f.dist, f.items))),
                                       f.dend, f.items);
  EXPECT_EQ(tree.leaves().size(), 2u);
  const auto& root = tree.node(tree.root());
  EXPECT_EQ(root.children.size(), 2u);
  EXPECT_FALSE(root.label.empty());
  EXPECT_EQ(tree.lookup("w1"), (std::vector<std::string>{root.label, "C0"}));
}

TEST(BuildConceptTree, MirrorsMergeOrder) {
  // Singletons {0}, {1}, {10} and a far pair: ((C0, C1), C2), C3.
  const auto f = line({0, 1, 10, 50, 50.5});
  const auto review = labeled(export_review(cut(f.dend, 4), f.dend, f.dist, f.items));
  ASSERT_EQ(review.blocks.size(), 4u);
  const auto tree = build_concept_tree(import_review(review), f.dend, f.items);
  const auto& root = tree.node(tree.root());
  ASSERT_EQ(root.children.size(), 2u);
  std::set<std::set<std::string>> top;
  for (auto c : root.children) top.insert(leaf_labels(tree, c));
  EXPECT_EQ(top, (std::set<std::set<std::string>>{{"C0", "C1", "C2"}, {"C3"}}));
  const auto* c2 = by_label(tree, "C2");
  ASSERT_NE(c2, nullptr);
  const auto path = *tree.lookup("w0");
  EXPECT_EQ(path.size(), 4u);
  EXPECT_EQ(path.back(), "C0");
  EXPECT_EQ(tree.lookup("w4")->size(), 2u);
}

TEST(BuildConceptTree, ExclusionsAndDroppedBranches) {
  const auto f = line({0, 1, 10, 50, 50.5});
  auto review = labeled(export_review(cut(f.dend, 4), f.dend, f.dist, f.items));
  review.blocks[2].exclusions = review.blocks[2].members;
  review.blocks[3].exclusions = {"w3"};
  const auto tree = build_concept_tree(import_review(review), f.dend, f.items);
  EXPECT_EQ(tree.leaves().size(), 3u);
  EXPECT_FALSE(tree.lookup("w2").has_value());
  EXPECT_FALSE(tree.lookup("w3").has_value());
  EXPECT_FALSE(tree.lookup("nothing").has_value());
  EXPECT_TRUE(classify_lookup(tree, "w4").has_value());
  const auto* leaf = by_label(tree, "C3");
  ASSERT_NE(leaf, nullptr);
  EXPECT_EQ(leaf->members, std::vector<std::string>{"w4"});
  EXPECT_EQ(leaf->excluded, std::vector<std::string>{"w3"});

  for (auto& b : review.blocks) b.exclusions = b.members;
  EXPECT_EQ(code_of([&] { build_concept_tree(import_review(review), f.dend, f.items); }), Errc::empty_tree);

  ClusterReviewFile stray{{{0, "a", {"ghost"}, {}}}};
  EXPECT_EQ(code_of([&] { build_concept_tree(import_review(stray), f.dend, f.items); }), Errc::unknown_token);
}

// Random instances: leaves equal the cut, tokens are disjoint, and the
// concept tree's triplet structure matches the dendrogram contracted to the
// retained clusters.
TEST(BuildConceptTree, InducedTreeMatchesContraction) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6 + rng() % 20;
    std::vector<double> xs(n);
    std::uniform_real_distribution<double> u(0, 100);
    for (auto& x : xs) x = u(rng);
    const auto f = line(xs);
    const std::size_t k = 2 + rng() % (n - 2);
    const auto assignment = cut(f.dend, k);
    auto review = labeled(export_review(assignment, f.dend, f.dist, f.items));
    // Drop a random subset of whole clusters, keeping at least two.
    std::vector<bool> kept(review.blocks.size(), true);
    for (std::size_t b = 2; b < review.blocks.size(); ++b) {
      if (rng() % 3 == 0) {
        kept[b] = false;
        review.blocks[b].exclusions = review.blocks[b].members;
      }
    }
    const auto tree = build_concept_tree(import_review(review), f.dend, f.items);

    std::set<std::string> seen;
    std::size_t retained_blocks = 0;
    for (std::size_t b = 0; b < review.blocks.size(); ++b) {
      if (!kept[b]) continue;
      ++retained_blocks;
      const auto* leaf = by_label(tree, review.blocks[b].label);
      ASSERT_NE(leaf, nullptr);
      auto want = review.blocks[b].members;
      auto got = leaf->members;
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, want);
      for (const auto& m : got) EXPECT_TRUE(seen.insert(m).second);
    }
    EXPECT_EQ(tree.leaves().size(), retained_blocks);

    // Dendrogram side: the set of leaf items under the LCA of two clusters.
    std::vector<std::set<std::size_t>> under(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) under[i] = {i};
    for (std::size_t m = 0; m < f.dend.merges().size(); ++m) {
      under[n + m] = under[f.dend.merges()[m].left];
      under[n + m].insert(under[f.dend.merges()[m].right].begin(), under[f.dend.merges()[m].right].end());
    }
    auto item_set = [&](std::size_t b) {
      std::set<std::size_t> s;
      for (const auto& m : review.blocks[b].members) s.insert(std::stoul(m.substr(1)));
      return s;
    };
    auto dend_lca = [&](std::size_t a, std::size_t b) {
      auto s = item_set(a);
      auto t = item_set(b);
      s.insert(t.begin(), t.end());
      for (std::size_t v = 0; v < under.size(); ++v) {
        if (std::includes(under[v].begin(), under[v].end(), s.begin(), s.end())) return v;
      }
      return under.size();
    };
    // Concept side: leaf labels under the LCA of two leaves.
    auto concept_lca_span = [&](std::size_t a, std::size_t b) {
      std::set<std::string> want{review.blocks[a].label, review.blocks[b].label};
      std::set<std::string> best;
      for (const auto& node : tree.nodes()) {
        auto s = leaf_labels(tree, node.id);
        if (std::includes(s.begin(), s.end(), want.begin(), want.end()) && (best.empty() || s.size() < best.size())) {
          best = s;
        }
      }
      return best;
    };
    std::vector<std::size_t> live;
    for (std::size_t b = 0; b < kept.size(); ++b) {
      if (kept[b]) live.push_back(b);
    }
    for (auto p : live)
      for (auto q : live)
        for (auto r : live) {
          if (p == q || p == r || q == r) continue;
          const auto& dq = under[dend_lca(p, q)];
          const auto& dr = under[dend_lca(p, r)];
          const bool dend_closer = dq.size() < dr.size() && std::includes(dr.begin(), dr.end(), dq.begin(), dq.end());
          const auto cq = concept_lca_span(p, q), cr = concept_lca_span(p, r);
          const bool concept_closer =
              cq.size() < cr.size() && std::includes(cr.begin(), cr.end(), cq.begin(), cq.end());
          EXPECT_EQ(dend_closer, concept_closer);
        }
    for (const auto& node : tree.nodes()) {
      if (!node.is_leaf() && node.id != tree.root()) {
        EXPECT_GE(node.children.size(), 2u);
      }
    }
  }
}

TEST(ConceptTree, FileRoundTripRelabelAndOutline) {
  const auto f = line({0, 1, 10, 50, 50.5});
  auto review = labeled(export_review(cut(f.dend, 4), f.dend, f.dist, f.items));
  review.blocks[3].exclusions = {"w3"};
  auto tree = build_concept_tree(import_review(review), f.dend, f.items);
  const auto text = format_concept_tree(tree);
  EXPECT_EQ(parse_concept_tree(text), tree);
  EXPECT_EQ(format_concept_tree(parse_concept_tree(text)), text);

  apply_labels(tree, std::to_string(tree.root()) + "\tEverything\n");
  EXPECT_EQ(tree.node(tree.root()).label, "Everything");
  EXPECT_EQ(tree.lookup("w4")->front(), "Everything");
  const auto outline = tree.outline();
  EXPECT_EQ(outline.substr(0, 11), "Everything\n");
  EXPECT_NE(outline.find("  C3"), std::string::npos);
  EXPECT_THROW(tree.relabel(tree.root(), ""), Error);

  const auto path = std::filesystem::temp_directory_path() / "cdisc_tree.json";
  save_concept_tree(path, tree);
  EXPECT_EQ(load_concept_tree(path), tree);
  std::filesystem::remove(path);
}

TEST(ConceptTree, ConstructorRejectsBadShapes) {
  ConceptNode a{0, "a", {}, 0, {"x"}, {}}, b{1, "b", {}, 1, {"x"}, {}}, r{2, "r", {0, 1}, std::nullopt, {}, {}};
  EXPECT_EQ(code_of([&] { ConceptTree({a, b, r}, 2); }), Errc::parse);
  b.members = {"y"};
  EXPECT_NO_THROW(ConceptTree({a, b, r}, 2));
  r.label = "";
  EXPECT_EQ(code_of([&] { ConceptTree({a, b, r}, 2); }), Errc::parse);
}
