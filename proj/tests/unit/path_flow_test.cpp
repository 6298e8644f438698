#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "forestflow/error.hpp"
#include "forestflow/path_flow.hpp"

namespace forestflow {
namespace {

const GroupLabel kT = GroupLabel::terminus();
GroupLabel cov(CovariateId c) { return GroupLabel::covariate(c); }
RankedGroup g(std::uint32_t rank, GroupLabel label) { return {rank, label}; }

ForestModel two_stumps() {
  ForestModel f = testing::stump_forest();
  f.trees.push_back(f.trees.front());
  return f;
}

TEST(GroupLabel, TerminusSortsFirst) {
  EXPECT_TRUE(GroupLabel().is_terminus());
  EXPECT_LT(kT, cov(0));
  EXPECT_LT(cov(0), cov(3));
  EXPECT_LT(g(1, cov(9)), g(2, kT));
}

TEST(EnumeratePaths, SingleLeaf) {
  Tree t;
  t.nodes = {TreeNode::leaf(1)};
  const auto paths = enumerate_paths(t);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].labels, std::vector<GroupLabel>{kT});
  EXPECT_EQ(paths[0].leaf_class, 1u);
}

TEST(EnumeratePaths, StumpAndFiveNodeTree) {
  const auto stump = enumerate_paths(testing::stump_forest().trees[0]);
  ASSERT_EQ(stump.size(), 2u);
  for (const Path& p : stump) EXPECT_EQ(p.labels, (std::vector<GroupLabel>{cov(1), kT}));

  const auto five = enumerate_paths(testing::five_node_forest().trees[0]);
  const std::vector<Path> expected{{{cov(0), cov(1), kT}, 0},
                                   {{cov(0), cov(1), kT}, 1},
                                   {{cov(0), kT}, 1}};
  EXPECT_EQ(five, expected);
}

TEST(SubtreeLeafCounts, Examples) {
  Tree leaf;
  leaf.nodes = {TreeNode::leaf(0)};
  EXPECT_EQ(subtree_leaf_counts(leaf), std::vector<std::uint64_t>{1});
  EXPECT_EQ(subtree_leaf_counts(testing::stump_forest().trees[0]),
            (std::vector<std::uint64_t>{2, 1, 1}));

  const Tree five = testing::five_node_forest().trees[0];
  const auto counts = subtree_leaf_counts(five);
  EXPECT_EQ(counts, (std::vector<std::uint64_t>{3, 2, 1, 1, 1}));
  // Cross-check each subtree against the number of enumerated paths through it.
  EXPECT_EQ(counts[0], enumerate_paths(five).size());
  Tree b;
  b.nodes = {TreeNode::internal(1, 1.5, 1, 2), TreeNode::leaf(0), TreeNode::leaf(1)};
  EXPECT_EQ(counts[1], enumerate_paths(b).size());

  EXPECT_EQ(subtree_leaf_counts(five, 0), (std::vector<std::uint64_t>{1, 1, 0, 1, 0}));
}

TEST(AggregateFlows, TwoIdenticalStumps) {
  const FlowAggregate a = aggregate_flows(two_stumps(), 5);
  ASSERT_EQ(a.edges.size(), 1u);
  EXPECT_EQ(a.edges.at({g(1, cov(1)), g(2, kT)}), 4u);
  EXPECT_EQ(a.total_paths, 4u);
  EXPECT_EQ(a.n_trees, 2u);
  EXPECT_EQ(a.group_totals.at(g(1, cov(1))), 4u);
  EXPECT_EQ(a.group_totals.at(g(2, kT)), 4u);
}

TEST(AggregateFlows, FiveNodeTree) {
  const FlowAggregate a = aggregate_flows(testing::five_node_forest(), 5);
  const std::map<std::pair<RankedGroup, RankedGroup>, std::uint64_t> expected{
      {{g(1, cov(0)), g(2, cov(1))}, 2},
      {{g(1, cov(0)), g(2, kT)}, 1},
      {{g(2, cov(1)), g(3, kT)}, 2}};
  EXPECT_EQ(a.edges, expected);
  EXPECT_EQ(a.total_paths, 3u);
  EXPECT_TRUE(testing::same_flows(a, testing::naive_aggregate(testing::five_node_forest(), 5, {})));
}

TEST(AggregateFlows, ClassRestriction) {
  const FlowAggregate a = aggregate_flows(testing::stump_forest(), 5, ClassId{0});
  ASSERT_EQ(a.edges.size(), 1u);
  EXPECT_EQ(a.edges.begin()->second, 1u);
  EXPECT_EQ(a.total_paths, 1u);
  EXPECT_EQ(a.class_restriction, ClassId{0});
  EXPECT_THROW(aggregate_flows(testing::stump_forest(), 5, ClassId{2}), InvalidArgument);
}

TEST(AggregateFlows, TruncationAndSingleLeafTree) {
  const FlowAggregate one = aggregate_flows(testing::five_node_forest(), 1);
  EXPECT_TRUE(one.edges.empty());
  EXPECT_EQ(one.group_totals.at(g(1, cov(0))), 3u);
  EXPECT_EQ(one.total_paths, 3u);

  ForestModel f = testing::stump_forest();
  f.trees[0].nodes = {TreeNode::leaf(0)};
  const FlowAggregate leaf = aggregate_flows(f, 5);
  EXPECT_TRUE(leaf.edges.empty());
  EXPECT_EQ(leaf.group_totals.at(g(1, kT)), 1u);
  EXPECT_TRUE(check_conservation(leaf).empty());

  EXPECT_THROW(aggregate_flows(f, 0), InvalidArgument);
}

TEST(RequireClass, ListsValidClasses) {
  const ForestModel f = testing::stump_forest();
  EXPECT_EQ(require_class(f, "b"), 1u);
  try {
    require_class(f, "c9");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("a, b"), std::string::npos) << e.what();
  }
}

TEST(ApplyThreshold, IdentityAndRange) {
  const FlowAggregate a = aggregate_flows(testing::five_node_forest(), 5);
  EXPECT_EQ(apply_threshold(a, 0.0), a);
  EXPECT_THROW(apply_threshold(a, 1.0 + 1e-9), InvalidArgument);
  EXPECT_THROW(apply_threshold(a, -0.1), InvalidArgument);
}

TEST(ApplyThreshold, FiveNodeTreeAtHalf) {
  const FlowAggregate a = aggregate_flows(testing::five_node_forest(), 5);
  const FlowAggregate t = apply_threshold(a, 0.5);

  // Hand filter: rank-2 totals are B 2, Terminus 1 (rank total 3), so the
  // Terminus group falls below 0.5 * 3. Every other rank keeps one group.
  auto edges = a.edges;
  edges.erase({g(1, cov(0)), g(2, kT)});
  EXPECT_EQ(t.edges, edges);
  EXPECT_FALSE(t.group_totals.count(g(2, kT)));
  EXPECT_EQ(t.group_totals.at(g(1, cov(0))), 2u);
  EXPECT_EQ(t.group_totals.at(g(2, cov(1))), 2u);
  EXPECT_EQ(t.group_totals.at(g(3, kT)), 2u);
  ASSERT_EQ(t.residual.size(), 5u);
  EXPECT_DOUBLE_EQ(t.residual[0], 0.0);
  EXPECT_DOUBLE_EQ(t.residual[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.residual[2], 0.0);
  EXPECT_EQ(t.threshold, 0.5);
  EXPECT_EQ(t.total_paths, a.total_paths);
}

TEST(ApplyThreshold, IdempotentWhenFractionsStillClear) {
  std::mt19937_64 gen(12);
  for (int i = 0; i < 40; ++i) {
    const ForestModel f = testing::random_forest(gen, 5, {});
    const FlowAggregate once = apply_threshold(aggregate_flows(f, 5), 0.2);
    bool clears = true;
    for (const auto& [grp, total] : once.group_totals) {
      if (total < 0.2 * static_cast<double>(once.rank_total(grp.rank))) clears = false;
    }
    if (!clears) continue;
    const FlowAggregate twice = apply_threshold(once, 0.2);
    EXPECT_EQ(twice.edges, once.edges);
    EXPECT_EQ(twice.group_totals, once.group_totals);
  }
}

TEST(Merge, IdentityCommutativityAndForestOracle) {
  std::mt19937_64 gen(77);
  const ForestModel f = testing::random_forest(gen, 10, {});
  const FlowAggregate whole = aggregate_flows(f, 4);
  const FlowAggregate empty = empty_aggregate(f, 4, std::nullopt);

  FlowAggregate folded = empty;
  for (std::size_t t = 0; t < f.n_trees(); ++t) folded = merge(folded, aggregate_tree(f, t, 4, {}));
  EXPECT_EQ(folded, whole);

  const FlowAggregate a = aggregate_tree(f, 0, 4, {});
  const FlowAggregate b = aggregate_tree(f, 1, 4, {});
  const FlowAggregate c = aggregate_tree(f, 2, 4, {});
  EXPECT_EQ(merge(a, empty), a);
  EXPECT_EQ(merge(a, b), merge(b, a));
  EXPECT_EQ(merge(merge(a, b), c), merge(a, merge(b, c)));
}

TEST(Merge, RejectsMismatches) {
  const ForestModel f = testing::five_node_forest();
  const FlowAggregate a = aggregate_flows(f, 5);
  EXPECT_THROW(merge(a, aggregate_flows(f, 4)), InvalidArgument);
  EXPECT_THROW(merge(a, aggregate_flows(f, 5, ClassId{0})), InvalidArgument);
  EXPECT_THROW(merge(a, apply_threshold(a, 0.5)), InvalidArgument);
  EXPECT_THROW(merge(a, aggregate_flows(testing::stump_forest(), 5)), InvalidArgument);
}

TEST(CheckConservation, DetectsTampering) {
  FlowAggregate a = aggregate_flows(testing::five_node_forest(), 5);
  EXPECT_TRUE(check_conservation(a).empty());
  a.edges[{g(2, cov(1)), g(3, kT)}] = 5;
  EXPECT_FALSE(check_conservation(a).empty());
  FlowAggregate b = aggregate_flows(testing::five_node_forest(), 5);
  b.total_paths = 4;
  EXPECT_FALSE(check_conservation(b).empty());
}

}  // namespace
}  // namespace forestflow
