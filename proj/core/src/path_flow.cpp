#include "forestflow/path_flow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "forestflow/error.hpp"
#include "parallel.hpp"

namespace forestflow {

std::vector<FlowEdge> FlowAggregate::edge_list() const {
  std::vector<FlowEdge> out;
  out.reserve(edges.size());
  for (const auto& [key, w] : edges) out.push_back({key.first, key.second, w});
  return out;
}

std::uint64_t FlowAggregate::max_edge_weight() const {
  std::uint64_t m = 0;
  for (const auto& [key, w] : edges) m = std::max(m, w);
  return m;
}

std::uint64_t FlowAggregate::inflow(const RankedGroup& g) const {
  std::uint64_t s = 0;
  for (const auto& [key, w] : edges) {
    if (key.second == g) s += w;
  }
  return s;
}

std::uint64_t FlowAggregate::outflow(const RankedGroup& g) const {
  std::uint64_t s = 0;
  for (auto it = edges.lower_bound({g, RankedGroup{0, GroupLabel::terminus()}});
       it != edges.end() && it->first.first == g; ++it) {
    s += it->second;
  }
  return s;
}

std::uint64_t FlowAggregate::rank_total(std::uint32_t rank) const {
  std::uint64_t s = 0;
  for (const auto& [g, total] : group_totals) {
    if (g.rank == rank) s += total;
  }
  return s;
}

namespace {

template <typename Visit>
void preorder(const Tree& tree, Visit&& visit) {
  // (node, rank)
  std::vector<std::pair<NodeId, std::uint32_t>> stack{{Tree::kRoot, 1}};
  while (!stack.empty()) {
    auto [id, rank] = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.nodes[id];
    if (!visit(id, rank) || node.is_leaf()) continue;
    stack.emplace_back(node.right, rank + 1);
    stack.emplace_back(node.left, rank + 1);
  }
}

GroupLabel label_of(const TreeNode& node) {
  return node.is_leaf() ? GroupLabel::terminus() : GroupLabel::covariate(node.split_covariate);
}

std::vector<std::uint64_t> leaf_counts(const Tree& tree, std::optional<ClassId> cls) {
  const std::size_t n = tree.nodes.size();
  std::vector<std::uint64_t> counts(n, 0);
  // Reverse preorder visits every child before its parent.
  std::vector<NodeId> order;
  order.reserve(n);
  preorder(tree, [&](NodeId id, std::uint32_t) {
    order.push_back(id);
    return true;
  });
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const TreeNode& node = tree.nodes[*it];
    if (node.is_leaf()) {
      counts[*it] = (!cls || node.prediction == *cls) ? 1 : 0;
    } else {
      counts[*it] = counts[node.left] + counts[node.right];
    }
  }
  return counts;
}

void check_compatible(const FlowAggregate& a, const FlowAggregate& b) {
  if (a.max_rank != b.max_rank) {
    throw InvalidArgument(
        fmt::format("cannot merge aggregates with max_rank {} and {}", a.max_rank, b.max_rank));
  }
  if (a.class_restriction != b.class_restriction) {
    throw InvalidArgument("cannot merge aggregates with different class restrictions");
  }
  if (a.covariate_names != b.covariate_names || a.class_names != b.class_names) {
    throw InvalidArgument("cannot merge aggregates over different covariates or classes");
  }
  if (a.threshold != 0.0 || b.threshold != 0.0 || !a.residual.empty() || !b.residual.empty()) {
    throw InvalidArgument("cannot merge thresholded aggregates");
  }
}

void accumulate(FlowAggregate& into, const FlowAggregate& from) {
  for (const auto& [key, w] : from.edges) into.edges[key] += w;
  for (const auto& [g, t] : from.group_totals) into.group_totals[g] += t;
  into.total_paths += from.total_paths;
  into.n_trees += from.n_trees;
}

}  // namespace

std::vector<Path> enumerate_paths(const Tree& tree) {
  std::vector<Path> paths;
  std::vector<GroupLabel> prefix;
  preorder(tree, [&](NodeId id, std::uint32_t rank) {
    prefix.resize(rank - 1);
    const TreeNode& node = tree.nodes[id];
    prefix.push_back(label_of(node));
    if (node.is_leaf()) paths.push_back({prefix, node.prediction});
    return true;
  });
  return paths;
}

std::vector<std::uint64_t> subtree_leaf_counts(const Tree& tree) {
  return leaf_counts(tree, std::nullopt);
}

std::vector<std::uint64_t> subtree_leaf_counts(const Tree& tree, ClassId cls) {
  return leaf_counts(tree, cls);
}

FlowAggregate empty_aggregate(const ForestModel& forest, std::uint32_t max_rank,
                              std::optional<ClassId> class_restriction) {
  if (max_rank == 0) throw InvalidArgument("max_rank must be at least 1");
  if (class_restriction && *class_restriction >= forest.n_classes()) {
    throw InvalidArgument(fmt::format("class index {} out of range", *class_restriction));
  }
  FlowAggregate agg;
  agg.max_rank = max_rank;
  agg.class_restriction = class_restriction;
  agg.covariate_names = forest.covariate_names;
  agg.class_names = forest.class_names;
  return agg;
}

FlowAggregate aggregate_tree(const ForestModel& forest, std::size_t tree_index,
                             std::uint32_t max_rank, std::optional<ClassId> class_restriction) {
  FlowAggregate agg = empty_aggregate(forest, max_rank, class_restriction);
  const Tree& tree = forest.trees.at(tree_index);
  const auto counts = leaf_counts(tree, class_restriction);
  agg.n_trees = 1;
  agg.total_paths = counts[Tree::kRoot];

  // Group of each visited node's parent, indexed by node id.
  std::vector<RankedGroup> group_of(tree.nodes.size());
  std::vector<NodeId> parent(tree.nodes.size(), Tree::kRoot);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (!n.is_leaf()) {
      parent[n.left] = static_cast<NodeId>(i);
      parent[n.right] = static_cast<NodeId>(i);
    }
  }
  preorder(tree, [&](NodeId id, std::uint32_t rank) {
    const std::uint64_t paths = counts[id];
    if (paths == 0) return false;
    const RankedGroup g{rank, label_of(tree.nodes[id])};
    group_of[id] = g;
    agg.group_totals[g] += paths;
    if (id != Tree::kRoot) agg.edges[{group_of[parent[id]], g}] += paths;
    return rank < max_rank;
  });
  return agg;
}

FlowAggregate aggregate_flows(const ForestModel& forest, std::uint32_t max_rank,
                              std::optional<ClassId> class_restriction, Execution exec) {
  FlowAggregate total = empty_aggregate(forest, max_rank, class_restriction);
  std::vector<FlowAggregate> per_tree(forest.n_trees());
  detail::parallel_for(forest.n_trees(), exec.threads, [&](std::size_t t) {
    per_tree[t] = aggregate_tree(forest, t, max_rank, class_restriction);
  });
  for (const auto& a : per_tree) accumulate(total, a);
  return total;
}

ClassId require_class(const ForestModel& forest, std::string_view label) {
  if (auto c = find_class(forest.class_names, label)) return *c;
  throw InvalidArgument(fmt::format("unknown class '{}'; valid classes: {}", label,
                                    fmt::join(forest.class_names, ", ")));
}

FlowAggregate apply_threshold(const FlowAggregate& agg, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument(fmt::format("threshold must be in [0, 1], got {}", theta));
  }
  if (theta == 0.0) return agg;

  std::vector<std::uint64_t> rank_totals(agg.max_rank + 1, 0);
  for (const auto& [g, t] : agg.group_totals) rank_totals[g.rank] += t;

  std::set<RankedGroup> removed;
  std::vector<std::uint64_t> removed_totals(agg.max_rank + 1, 0);
  for (const auto& [g, t] : agg.group_totals) {
    if (static_cast<double>(t) < theta * static_cast<double>(rank_totals[g.rank])) {
      removed.insert(g);
      removed_totals[g.rank] += t;
    }
  }

  FlowAggregate out = agg;
  out.threshold = theta;
  out.residual.assign(agg.max_rank, 0.0);
  for (std::uint32_t r = 1; r <= agg.max_rank; ++r) {
    if (rank_totals[r] > 0) {
      out.residual[r - 1] =
          static_cast<double>(removed_totals[r]) / static_cast<double>(rank_totals[r]);
    }
  }

  std::set<RankedGroup> had_edges;
  out.edges.clear();
  for (const auto& [key, w] : agg.edges) {
    had_edges.insert(key.first);
    had_edges.insert(key.second);
    if (removed.count(key.first) || removed.count(key.second)) continue;
    out.edges.emplace(key, w);
  }

  std::map<RankedGroup, std::uint64_t> in, outw;
  for (const auto& [key, w] : out.edges) {
    outw[key.first] += w;
    in[key.second] += w;
  }
  out.group_totals.clear();
  for (const auto& [g, t] : agg.group_totals) {
    if (removed.count(g)) continue;
    if (!had_edges.count(g)) {
      out.group_totals[g] = t;  // isolated from the start, e.g. a rank-1 Terminus
      continue;
    }
    const std::uint64_t total = std::max(in[g], outw[g]);
    if (total > 0) out.group_totals[g] = total;
  }
  return out;
}

FlowAggregate merge(const FlowAggregate& a, const FlowAggregate& b) {
  check_compatible(a, b);
  FlowAggregate out = a;
  accumulate(out, b);
  return out;
}

std::vector<std::string> check_conservation(const FlowAggregate& agg) {
  std::vector<std::string> problems;
  std::map<RankedGroup, std::uint64_t> in, out;
  for (const auto& [key, w] : agg.edges) {
    const auto& [from, to] = key;
    if (to.rank != from.rank + 1) {
      problems.push_back(fmt::format("edge {}->{} skips a rank", from.rank, to.rank));
    }
    if (from.label.is_terminus()) {
      problems.push_back(fmt::format("edge leaves a Terminus group at rank {}", from.rank));
    }
    if (w == 0) problems.push_back("zero-weight edge");
    if (to.rank > agg.max_rank) problems.push_back("edge beyond max_rank");
    out[from] += w;
    in[to] += w;
  }
  std::uint64_t rank1 = 0;
  for (const auto& [g, total] : agg.group_totals) {
    const std::string name =
        g.label.is_terminus() ? fmt::format("({}, Terminus)", g.rank)
                              : fmt::format("({}, {})", g.rank, g.label.covariate_id());
    if (g.rank == 1) {
      rank1 += total;
    } else if (in[g] != total) {
      problems.push_back(fmt::format("group {}: inflow {} != total {}", name, in[g], total));
    }
    if (g.label.is_terminus()) {
      if (out[g] != 0) problems.push_back(fmt::format("Terminus group {} has outflow", name));
    } else if (g.rank < agg.max_rank && out[g] != total) {
      problems.push_back(fmt::format("group {}: outflow {} != inflow {}", name, out[g], total));
    }
  }
  if (rank1 != agg.total_paths) {
    problems.push_back(
        fmt::format("rank-1 totals sum to {}, total_paths is {}", rank1, agg.total_paths));
  }
  for (const auto& [g, w] : in) {
    if (!agg.group_totals.count(g)) problems.push_back("edge into unknown group");
  }
  for (const auto& [g, w] : out) {
    if (!agg.group_totals.count(g)) problems.push_back("edge out of unknown group");
  }
  return problems;
}

}  // namespace forestflow
