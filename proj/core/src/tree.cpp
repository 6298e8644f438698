#include "forestflow/tree.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "forestflow/error.hpp"

namespace forestflow {

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::internal_count() const { return nodes.size() - leaf_count(); }

NodeId Tree::route(std::span<const double> row) const {
  NodeId id = kRoot;
  while (!nodes[id].is_leaf()) {
    const TreeNode& n = nodes[id];
    id = row[n.split_covariate] <= n.split_threshold ? n.left : n.right;
  }
  return id;
}

void validate_tree(const Tree& tree, std::size_t n_covariates, std::size_t n_classes) {
  const std::size_t n = tree.nodes.size();
  if (n == 0) throw ValidationError("tree has no nodes");

  std::vector<int> parents(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      if (node.prediction >= n_classes) {
        throw ValidationError(
            fmt::format("node {}: prediction {} is not a valid class", i, node.prediction));
      }
      continue;
    }
    if (node.split_covariate >= n_covariates) {
      throw ValidationError(fmt::format("node {}: split covariate {} out of range", i,
                                        node.split_covariate));
    }
    for (NodeId child : {node.left, node.right}) {
      if (child >= n) {
        throw ValidationError(
            fmt::format("node {}: dangling child index {} (tree has {} nodes)", i, child, n));
      }
    }
    if (node.left == node.right) {
      throw ValidationError(fmt::format("node {}: both children are node {}", i, node.left));
    }
  }

  // Iterative DFS with colouring. Reaching a node on the current stack is a
  // cycle; reaching a finished node means a second parent.
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> colour(n, kWhite);
  std::vector<std::pair<NodeId, int>> stack{{Tree::kRoot, 0}};
  colour[Tree::kRoot] = kGrey;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const TreeNode& node = tree.nodes[id];
    if (node.is_leaf() || next == 2) {
      colour[id] = kBlack;
      stack.pop_back();
      continue;
    }
    NodeId child = next == 0 ? node.left : node.right;
    ++next;
    if (child == Tree::kRoot || colour[child] == kGrey) {
      throw ValidationError(fmt::format("cycle detected: node {} is its own ancestor", child));
    }
    if (colour[child] == kBlack) {
      throw ValidationError(fmt::format("node {} has more than one parent", child));
    }
    colour[child] = kGrey;
    stack.emplace_back(child, 0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (colour[i] != kBlack) {
      throw ValidationError(fmt::format("node {} is not reachable from the root", i));
    }
  }
}

}  // namespace forestflow
