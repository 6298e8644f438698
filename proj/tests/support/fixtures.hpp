#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "forestflow/dataset.hpp"
#include "forestflow/forest.hpp"
#include "forestflow/path_flow.hpp"
#include "forestflow/tree.hpp"

namespace forestflow::testing {

// Stump on covariate "x.17" (index 1 of {"x.13", "x.17"}); left leaf "a",
// right leaf "b". Trained on four rows, root impurity decrease 0.5.
ForestModel stump_forest();

// Root A; left child B with two leaves; right child a leaf.
//   0: A <= 0.5 -> 1, 2
//   1: B <= 1.5 -> 3, 4
//   2: leaf b
//   3: leaf a
//   4: leaf b
ForestModel five_node_forest();

struct RandomTreeSpec {
  std::size_t min_nodes = 3;
  std::size_t max_nodes = 64;
  std::size_t n_covariates = 10;
  std::size_t n_classes = 4;
  // Shuffle node storage order (root stays at 0).
  bool shuffle_storage = true;
};

// Valid random tree grown by expanding random leaves.
Tree random_tree(std::mt19937_64& gen, const RandomTreeSpec& spec);

// Random forest with names, no config and no oob table unless requested.
ForestModel random_forest(std::mt19937_64& gen, std::size_t n_trees,
                          const RandomTreeSpec& spec, bool with_oob = false,
                          std::size_t n_rows = 20);

// Covariates 1 and 2 decide the class (four classes from their signs),
// covariates 3..10 are independent noise.
Dataset informative_dataset(std::size_t n_rows, std::uint64_t seed);

// Reference aggregation by explicit recursive traversal of every
// root-to-leaf path, independent of the library's path machinery.
struct NaiveAggregate {
  std::map<std::pair<RankedGroup, RankedGroup>, std::uint64_t> edges;
  std::map<RankedGroup, std::uint64_t> group_totals;
  std::uint64_t total_paths = 0;
};

NaiveAggregate naive_aggregate(const ForestModel& forest, std::uint32_t max_rank,
                               std::optional<ClassId> class_restriction);

bool same_flows(const FlowAggregate& agg, const NaiveAggregate& naive);

// Edge-wise sum of the per-class aggregates equals the unrestricted one.
bool per_class_sums_match(const ForestModel& forest, std::uint32_t max_rank);

}  // namespace forestflow::testing
