#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forestflow/dataset.hpp"

namespace forestflow {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { kInternal, kLeaf };

// One node of a binary classification tree. Rows whose split covariate is
// <= split_threshold go to the left child.
struct TreeNode {
  NodeKind kind = NodeKind::kLeaf;
  CovariateId split_covariate = 0;
  double split_threshold = 0.0;
  NodeId left = 0;
  NodeId right = 0;
  ClassId prediction = 0;
  std::uint32_t n_train = 0;
  double impurity_decrease = 0.0;

  bool is_leaf() const { return kind == NodeKind::kLeaf; }

  static TreeNode leaf(ClassId prediction, std::uint32_t n_train = 0) {
    TreeNode n;
    n.prediction = prediction;
    n.n_train = n_train;
    return n;
  }
  static TreeNode internal(CovariateId covariate, double threshold, NodeId left,
                           NodeId right, std::uint32_t n_train = 0,
                           double impurity_decrease = 0.0) {
    TreeNode n;
    n.kind = NodeKind::kInternal;
    n.split_covariate = covariate;
    n.split_threshold = threshold;
    n.left = left;
    n.right = right;
    n.n_train = n_train;
    n.impurity_decrease = impurity_decrease;
    return n;
  }

  bool operator==(const TreeNode&) const = default;
};

// Node array; the root is always node 0.
struct Tree {
  std::vector<TreeNode> nodes;

  static constexpr NodeId kRoot = 0;

  const TreeNode& root() const { return nodes[kRoot]; }
  std::size_t leaf_count() const;
  std::size_t internal_count() const;

  // Index of the leaf reached by `row`.
  NodeId route(std::span<const double> row) const;
  ClassId predict(std::span<const double> row) const {
    return nodes[route(row)].prediction;
  }

  bool operator==(const Tree&) const = default;
};

// Checks every structural invariant: nonempty, children in range, each
// non-root node has exactly one parent, no cycles, every node reachable from
// the root, covariate and class indices in range. Throws ValidationError.
void validate_tree(const Tree& tree, std::size_t n_covariates,
                   std::size_t n_classes);

}  // namespace forestflow
