#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "forestflow/error.hpp"
#include "forestflow/forest.hpp"
#include "forestflow/importance.hpp"

namespace forestflow {
namespace {

Dataset four_rows() {
  return Dataset::from_rows({"x"}, {{1}, {2}, {3}, {4}}, {"a", "a", "b", "b"});
}

TEST(TrainForest, IdentityBootstrapGivesPureStump) {
  const Dataset d = four_rows();
  RFConfig cfg;
  cfg.n_trees = 1;
  cfg.mtry = 1;
  cfg.bootstrap_size = 4;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    cfg.seed = seed;
    const ForestModel f = train_forest(d, cfg);
    // Four draws with an empty OOB set means every row was drawn once.
    if (!f.oob_indices->front().empty()) continue;
    found = true;
    const Tree& t = f.trees.front();
    ASSERT_EQ(t.nodes.size(), 3u);
    EXPECT_FALSE(t.root().is_leaf());
    EXPECT_EQ(t.root().split_covariate, 0u);
    EXPECT_DOUBLE_EQ(t.root().split_threshold, 2.5);
    EXPECT_DOUBLE_EQ(t.root().impurity_decrease, 0.5);
    EXPECT_EQ(t.nodes[t.root().left].prediction, 0u);
    EXPECT_EQ(t.nodes[t.root().right].prediction, 1u);
    EXPECT_EQ(t.nodes[t.root().left].n_train, 2u);
  }
  EXPECT_TRUE(found);
}

TEST(TrainForest, PureBootstrapGivesSingleLeaf) {
  const Dataset d = four_rows();
  RFConfig cfg;
  cfg.n_trees = 64;
  cfg.mtry = 1;
  cfg.seed = 3;
  const ForestModel f = train_forest(d, cfg);
  bool saw_leaf_only = false;
  for (std::size_t t = 0; t < f.n_trees(); ++t) {
    const auto& oob = (*f.oob_indices)[t];
    const bool only_a = std::find(oob.begin(), oob.end(), 2) != oob.end() &&
                        std::find(oob.begin(), oob.end(), 3) != oob.end();
    if (only_a) {
      saw_leaf_only = true;
      ASSERT_EQ(f.trees[t].nodes.size(), 1u);
      EXPECT_EQ(f.trees[t].root().prediction, 0u);
    }
  }
  EXPECT_TRUE(saw_leaf_only);
}

TEST(TrainForest, RejectsBadInput) {
  const Dataset d = four_rows();
  RFConfig cfg;
  cfg.n_trees = 1;
  cfg.mtry = 2;
  EXPECT_THROW(train_forest(d, cfg), InvalidArgument);
  cfg.mtry = 0;
  EXPECT_THROW(train_forest(d, cfg), InvalidArgument);
  cfg.mtry = 1;
  cfg.min_node_size = 0;
  EXPECT_THROW(train_forest(d, cfg), InvalidArgument);
  cfg.min_node_size = 1;
  cfg.n_trees = 0;
  EXPECT_THROW(train_forest(d, cfg), InvalidArgument);
  cfg.n_trees = 1;

  const Dataset one_class = Dataset::from_rows({"x"}, {{1}, {2}}, {"a", "a"});
  EXPECT_THROW(train_forest(one_class, cfg), InvalidArgument);
  Dataset empty;
  empty.covariate_names = {"x"};
  empty.class_names = {"a", "b"};
  EXPECT_THROW(train_forest(empty, cfg), InvalidArgument);
}

TEST(TrainForest, StructuralInvariants) {
  const Dataset d = testing::informative_dataset(300, 11);
  RFConfig cfg;
  cfg.n_trees = 20;
  cfg.mtry = 3;
  cfg.seed = 5;
  const ForestModel f = train_forest(d, cfg);
  EXPECT_NO_THROW(f.validate());
  ASSERT_EQ(f.n_trees(), 20u);
  for (const Tree& t : f.trees) {
    EXPECT_EQ(t.leaf_count(), t.internal_count() + 1);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      const NodeId leaf = t.route(d.row(i));
      ASSERT_LT(leaf, t.nodes.size());
      EXPECT_TRUE(t.nodes[leaf].is_leaf());
    }
  }
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    const Prediction p = predict(f, d.row(i));
    double sum = 0;
    for (double v : p.vote_fractions) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(TrainForest, MinNodeSizeAndMaxNodes) {
  const Dataset d = testing::informative_dataset(200, 2);
  RFConfig cfg;
  cfg.n_trees = 10;
  cfg.mtry = 4;
  cfg.min_node_size = 5;
  const ForestModel f = train_forest(d, cfg);
  for (const Tree& t : f.trees) {
    for (const TreeNode& n : t.nodes) {
      if (n.is_leaf()) EXPECT_GE(n.n_train, 5u);
    }
  }
  cfg.min_node_size = 1;
  cfg.max_nodes = 7;
  const ForestModel g = train_forest(d, cfg);
  for (const Tree& t : g.trees) EXPECT_LE(t.nodes.size(), 7u);
}

TEST(TrainForest, ScheduleIndependent) {
  const Dataset d = testing::informative_dataset(250, 9);
  RFConfig cfg;
  cfg.n_trees = 24;
  cfg.mtry = 3;
  cfg.seed = 42;
  const ForestModel one = train_forest(d, cfg, Execution{1});
  const ForestModel many = train_forest(d, cfg, Execution{4});
  EXPECT_EQ(one, many);
  EXPECT_EQ(train_forest(d, cfg, Execution{3}), one);
  cfg.seed = 43;
  EXPECT_NE(train_forest(d, cfg, Execution{1}).trees, one.trees);
}

ForestModel stumps_voting(const std::vector<ClassId>& votes) {
  ForestModel f;
  f.covariate_names = {"x"};
  f.class_names = {"a", "b"};
  for (ClassId c : votes) {
    Tree t;
    t.nodes = {TreeNode::internal(0, 0.0, 1, 2), TreeNode::leaf(c), TreeNode::leaf(c)};
    f.trees.push_back(t);
  }
  return f;
}

TEST(Predict, MajorityAndTies) {
  const std::vector<double> row{1.0};
  const Prediction p = predict(stumps_voting({0, 0, 1}), row);
  EXPECT_EQ(p.label, 0u);
  EXPECT_DOUBLE_EQ(p.vote_fractions[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.vote_fractions[1], 1.0 / 3.0);

  const Prediction single = predict(stumps_voting({1}), row);
  EXPECT_EQ(single.label, 1u);
  EXPECT_DOUBLE_EQ(single.vote_fractions[1], 1.0);

  EXPECT_EQ(predict(stumps_voting({0, 0, 1, 1}), row).label, 0u);
  EXPECT_EQ(predict(stumps_voting({1, 1, 0, 0}), row).label, 0u);
}

TEST(Predict, ThresholdGoesLeft) {
  ForestModel f = testing::stump_forest();
  EXPECT_EQ(predict(f, std::vector<double>{0.0, 2.5}).label, 0u);
  EXPECT_EQ(predict(f, std::vector<double>{0.0, 2.5000001}).label, 1u);
  EXPECT_THROW(predict(f, std::vector<double>{1.0}), InvalidArgument);
}

TEST(OobAccuracy, ConstantPredictors) {
  const Dataset d = Dataset::from_rows({"x"}, {{1}, {2}, {3}}, {"a", "a", "b"});
  ForestModel right = stumps_voting({0, 0});
  right.oob_indices = std::vector<std::vector<RowIndex>>{{0, 1}, {1}};
  EXPECT_DOUBLE_EQ(oob_accuracy(right, d), 1.0);

  ForestModel wrong = stumps_voting({1, 1});
  wrong.oob_indices = std::vector<std::vector<RowIndex>>{{0}, {0, 1}};
  EXPECT_DOUBLE_EQ(oob_accuracy(wrong, d), 0.0);

  ForestModel none = stumps_voting({0});
  EXPECT_THROW(oob_accuracy(none, d), InvalidArgument);
}

TEST(OobAccuracy, HandTabulatedVotes) {
  // Rows x = 1, 2, 3 with classes a, b, b.
  const Dataset d = Dataset::from_rows({"x"}, {{1}, {2}, {3}}, {"a", "b", "b"});
  ForestModel f;
  f.covariate_names = {"x"};
  f.class_names = {"a", "b"};
  Tree split;  // x <= 1.5 -> a, else b
  split.nodes = {TreeNode::internal(0, 1.5, 1, 2), TreeNode::leaf(0), TreeNode::leaf(1)};
  Tree always_a;
  always_a.nodes = {TreeNode::leaf(0)};
  f.trees = {split, always_a};
  f.oob_indices = std::vector<std::vector<RowIndex>>{{1, 2}, {0, 2}};

  // Tabulate: votes[row][class] over trees whose OOB set holds the row.
  std::vector<std::array<int, 2>> votes(3, {0, 0});
  for (std::size_t t = 0; t < f.n_trees(); ++t) {
    for (RowIndex r : (*f.oob_indices)[t]) ++votes[r][f.trees[t].predict(d.row(r))];
  }
  int counted = 0, correct = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    if (votes[r][0] + votes[r][1] == 0) continue;
    ++counted;
    const ClassId winner = votes[r][1] > votes[r][0] ? 1 : 0;
    correct += winner == d.responses[r];
  }
  // Row 0: a (right). Row 1: b (right). Row 2: a vs b tie -> a (wrong).
  EXPECT_EQ(correct, 2);
  EXPECT_DOUBLE_EQ(oob_accuracy(f, d), static_cast<double>(correct) / counted);
}

TEST(OobAccuracy, AlwaysInBagRowsAreSkipped) {
  const Dataset d = Dataset::from_rows({"x"}, {{1}, {2}, {3}}, {"a", "a", "b"});
  ForestModel f = stumps_voting({0});
  f.oob_indices = std::vector<std::vector<RowIndex>>{{0}};
  EXPECT_DOUBLE_EQ(oob_accuracy(f, d), 1.0);
}

TEST(DefaultMtry, FloorSqrt) {
  EXPECT_EQ(default_mtry(36), 6u);
  EXPECT_EQ(default_mtry(35), 5u);
  EXPECT_EQ(default_mtry(1), 1u);
  EXPECT_EQ(default_mtry(0), 1u);
}

TEST(Execution, ReadsEnvironment) {
  ::setenv("FORESTFLOW_THREADS", "3", 1);
  EXPECT_EQ(Execution::from_environment().threads, 3u);
  ::unsetenv("FORESTFLOW_THREADS");
  EXPECT_GE(Execution::from_environment().threads, 1u);
}

}  // namespace
}  // namespace forestflow
