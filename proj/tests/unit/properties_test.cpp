#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "forestflow/forest_io.hpp"
#include "forestflow/path_flow.hpp"

namespace forestflow {
namespace {

TEST(RandomTrees, AreValid) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 100; ++i) {
    const Tree t = testing::random_tree(gen, {});
    ASSERT_NO_THROW(validate_tree(t, 10, 4));
    EXPECT_LE(t.nodes.size(), 64u);
    EXPECT_GE(t.nodes.size(), 3u);
    EXPECT_EQ(t.leaf_count(), t.internal_count() + 1);
    EXPECT_EQ(enumerate_paths(t).size(), t.leaf_count());
  }
}

TEST(FlowProperties, OracleEquivalenceEveryRankAndClass) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 60; ++i) {
    const ForestModel f = testing::random_forest(gen, 1 + i % 3, {});
    for (std::uint32_t rank = 1; rank <= 8; ++rank) {
      ASSERT_TRUE(testing::same_flows(aggregate_flows(f, rank),
                                      testing::naive_aggregate(f, rank, std::nullopt)));
      for (ClassId c = 0; c < f.n_classes(); ++c) {
        ASSERT_TRUE(testing::same_flows(aggregate_flows(f, rank, c),
                                        testing::naive_aggregate(f, rank, c)))
            << "forest " << i << " rank " << rank << " class " << c;
      }
    }
  }
}

TEST(FlowProperties, ConservationAndPerClassDecomposition) {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 40; ++i) {
    const ForestModel f = testing::random_forest(gen, 6, {});
    for (std::uint32_t rank : {1u, 2u, 5u, 9u}) {
      const FlowAggregate a = aggregate_flows(f, rank);
      const auto problems = check_conservation(a);
      EXPECT_TRUE(problems.empty()) << problems.front();
      for (ClassId c = 0; c < f.n_classes(); ++c) {
        EXPECT_TRUE(check_conservation(aggregate_flows(f, rank, c)).empty());
      }
      EXPECT_TRUE(testing::per_class_sums_match(f, rank));
      std::uint64_t leaves = 0;
      for (const Tree& t : f.trees) leaves += t.leaf_count();
      EXPECT_EQ(a.total_paths, leaves);
    }
  }
}

TEST(FlowProperties, ThreadCountDoesNotMatter) {
  std::mt19937_64 gen(8);
  const ForestModel f = testing::random_forest(gen, 30, {});
  EXPECT_EQ(aggregate_flows(f, 5, std::nullopt, Execution{1}),
            aggregate_flows(f, 5, std::nullopt, Execution{6}));
}

TEST(ForestProperties, SerializationRoundTrip) {
  std::mt19937_64 gen(50);
  for (int i = 0; i < 50; ++i) {
    const ForestModel f = testing::random_forest(gen, 1 + i % 5, {}, i % 2 == 0);
    const std::string text = serialize_forest(f);
    const ForestModel g = parse_forest(text);
    ASSERT_EQ(f, g) << "forest " << i;
    EXPECT_EQ(serialize_forest(g), text);
  }
}

}  // namespace
}  // namespace forestflow
