#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forestflow/dataset.hpp"
#include "forestflow/forest.hpp"
#include "forestflow/tree.hpp"

namespace forestflow {

inline constexpr std::uint32_t kDefaultMaxRank = 5;

// A covariate index or the Terminus marker. Terminus orders before every
// covariate, matching its place as the first gradation on each axis.
class GroupLabel {
 public:
  constexpr GroupLabel() : value_(-1) {}
  static constexpr GroupLabel terminus() { return GroupLabel(-1); }
  static constexpr GroupLabel covariate(CovariateId id) {
    return GroupLabel(static_cast<std::int64_t>(id));
  }

  constexpr bool is_terminus() const { return value_ < 0; }
  // Precondition: !is_terminus().
  constexpr CovariateId covariate_id() const {
    return static_cast<CovariateId>(value_);
  }

  auto operator<=>(const GroupLabel&) const = default;

 private:
  constexpr explicit GroupLabel(std::int64_t v) : value_(v) {}
  std::int64_t value_;
};

// (rank along a path, label); rank 1 is the root.
struct RankedGroup {
  std::uint32_t rank = 1;
  GroupLabel label = GroupLabel::terminus();

  auto operator<=>(const RankedGroup&) const = default;
};

struct FlowEdge {
  RankedGroup from;
  RankedGroup to;
  std::uint64_t weight = 0;

  bool operator==(const FlowEdge&) const = default;
};

// Weighted rank-indexed network over all root-to-leaf paths of a forest.
// A path that ends at rank r contributes nothing beyond rank r.
struct FlowAggregate {
  std::map<std::pair<RankedGroup, RankedGroup>, std::uint64_t> edges;
  std::map<RankedGroup, std::uint64_t> group_totals;
  std::uint64_t total_paths = 0;
  std::uint32_t max_rank = kDefaultMaxRank;
  std::optional<ClassId> class_restriction;
  std::uint64_t n_trees = 0;
  std::vector<std::string> covariate_names;
  std::vector<std::string> class_names;
  // Set by apply_threshold: theta used and removed fraction per rank
  // (index 0 is rank 1).
  double threshold = 0.0;
  std::vector<double> residual;

  bool empty() const { return group_totals.empty(); }
  std::vector<FlowEdge> edge_list() const;
  std::uint64_t max_edge_weight() const;
  std::uint64_t inflow(const RankedGroup& g) const;
  std::uint64_t outflow(const RankedGroup& g) const;
  // Sum of group totals at `rank`.
  std::uint64_t rank_total(std::uint32_t rank) const;

  bool operator==(const FlowAggregate&) const = default;
};

struct Path {
  std::vector<GroupLabel> labels;  // ends with exactly one Terminus
  ClassId leaf_class = 0;

  bool operator==(const Path&) const = default;
};

// One path per leaf, depth-first with left before right.
std::vector<Path> enumerate_paths(const Tree& tree);

// Leaf count of the subtree rooted at each node, indexed by node id.
std::vector<std::uint64_t> subtree_leaf_counts(const Tree& tree);

// Leaf counts restricted to leaves predicting `cls`.
std::vector<std::uint64_t> subtree_leaf_counts(const Tree& tree, ClassId cls);

// Empty aggregate carrying only the parameters.
FlowAggregate empty_aggregate(const ForestModel& forest, std::uint32_t max_rank,
                              std::optional<ClassId> class_restriction);

// Aggregate of a single tree (n_trees == 1).
FlowAggregate aggregate_tree(const ForestModel& forest, std::size_t tree_index,
                             std::uint32_t max_rank,
                             std::optional<ClassId> class_restriction);

// Paths longer than max_rank are truncated after rank max_rank. When
// class_restriction is set only paths to leaves predicting that class count.
FlowAggregate aggregate_flows(const ForestModel& forest, std::uint32_t max_rank,
                              std::optional<ClassId> class_restriction =
                                  std::nullopt,
                              Execution exec = {});

// Looks up a class by name; throws InvalidArgument listing the valid
// classes when absent.
ClassId require_class(const ForestModel& forest, std::string_view label);

// Drops every group whose total is below theta times its rank's total,
// together with its incident edges, then recomputes group totals from the
// surviving edges. theta == 0 returns the input unchanged. Throws
// InvalidArgument when theta is outside [0, 1].
FlowAggregate apply_threshold(const FlowAggregate& agg, double theta);

// Edge-wise and group-wise sum. Throws InvalidArgument on mismatched
// max_rank, class restriction, names, or on thresholded inputs.
FlowAggregate merge(const FlowAggregate& a, const FlowAggregate& b);

// Empty when the conservation invariants hold, otherwise one message per
// violation.
std::vector<std::string> check_conservation(const FlowAggregate& agg);

}  // namespace forestflow
