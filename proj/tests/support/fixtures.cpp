#include "fixtures.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace forestflow::testing {

ForestModel stump_forest() {
  ForestModel f;
  f.covariate_names = {"x.13", "x.17"};
  f.class_names = {"a", "b"};
  Tree t;
  t.nodes = {TreeNode::internal(1, 2.5, 1, 2, 4, 0.5), TreeNode::leaf(0, 2),
             TreeNode::leaf(1, 2)};
  f.trees.push_back(t);
  return f;
}

ForestModel five_node_forest() {
  ForestModel f;
  f.covariate_names = {"A", "B"};
  f.class_names = {"a", "b"};
  Tree t;
  t.nodes = {TreeNode::internal(0, 0.5, 1, 2, 10, 0.3),
             TreeNode::internal(1, 1.5, 3, 4, 6, 0.25), TreeNode::leaf(1, 4),
             TreeNode::leaf(0, 3), TreeNode::leaf(1, 3)};
  f.trees.push_back(t);
  return f;
}

Tree random_tree(std::mt19937_64& gen, const RandomTreeSpec& spec) {
  std::uniform_int_distribution<std::size_t> internal_count((spec.min_nodes - 1) / 2,
                                                            (spec.max_nodes - 1) / 2);
  std::uniform_int_distribution<CovariateId> cov(0, static_cast<CovariateId>(spec.n_covariates - 1));
  std::uniform_int_distribution<ClassId> cls(0, static_cast<ClassId>(spec.n_classes - 1));
  std::uniform_real_distribution<double> thr(-100.0, 100.0);
  std::uniform_int_distribution<std::uint32_t> n_leaf(1, 20);
  std::uniform_real_distribution<double> decrease(0.0, 0.5);

  Tree t;
  t.nodes.push_back(TreeNode::leaf(cls(gen)));
  std::vector<NodeId> leaves{0};
  const std::size_t target = internal_count(gen);
  for (std::size_t k = 0; k < target; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
    const std::size_t at = pick(gen);
    const NodeId id = leaves[at];
    const auto left = static_cast<NodeId>(t.nodes.size());
    t.nodes[id] = TreeNode::internal(cov(gen), thr(gen), left, left + 1, 0, decrease(gen));
    t.nodes.push_back(TreeNode::leaf(cls(gen)));
    t.nodes.push_back(TreeNode::leaf(cls(gen)));
    leaves[at] = left;
    leaves.push_back(left + 1);
  }

  std::function<std::uint32_t(NodeId)> fill = [&](NodeId id) -> std::uint32_t {
    TreeNode& n = t.nodes[id];
    if (n.is_leaf()) return n.n_train = n_leaf(gen);
    const std::uint32_t l = fill(n.left);
    const std::uint32_t r = fill(t.nodes[id].right);
    return t.nodes[id].n_train = l + r;
  };
  fill(Tree::kRoot);

  if (!spec.shuffle_storage || t.nodes.size() < 3) return t;
  std::vector<NodeId> to(t.nodes.size());
  std::iota(to.begin(), to.end(), 0);
  std::shuffle(to.begin() + 1, to.end(), gen);
  Tree shuffled;
  shuffled.nodes.resize(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    TreeNode n = t.nodes[i];
    if (!n.is_leaf()) {
      n.left = to[n.left];
      n.right = to[n.right];
    }
    shuffled.nodes[to[i]] = n;
  }
  return shuffled;
}

ForestModel random_forest(std::mt19937_64& gen, std::size_t n_trees,
                          const RandomTreeSpec& spec, bool with_oob, std::size_t n_rows) {
  ForestModel f;
  for (std::size_t j = 0; j < spec.n_covariates; ++j) {
    f.covariate_names.push_back("v" + std::to_string(j + 1));
  }
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    f.class_names.push_back("class " + std::to_string(c));
  }
  for (std::size_t i = 0; i < n_trees; ++i) f.trees.push_back(random_tree(gen, spec));
  if (with_oob) {
    std::bernoulli_distribution keep(0.37);
    std::vector<std::vector<RowIndex>> oob(n_trees);
    for (auto& rows : oob) {
      for (RowIndex r = 0; r < n_rows; ++r) {
        if (keep(gen)) rows.push_back(r);
      }
    }
    f.oob_indices = std::move(oob);
  }
  return f;
}

Dataset informative_dataset(std::size_t n_rows, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::string> names;
  for (int j = 1; j <= 10; ++j) names.push_back("c" + std::to_string(j));
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_rows; ++i) {
    std::vector<double> row(10);
    for (double& v : row) v = u(gen);
    const char* cls[] = {"neither", "second", "first", "both"};
    labels.emplace_back(cls[(row[0] > 0 ? 2 : 0) + (row[1] > 0 ? 1 : 0)]);
    rows.push_back(std::move(row));
  }
  return Dataset::from_rows(std::move(names), rows, labels);
}

NaiveAggregate naive_aggregate(const ForestModel& forest, std::uint32_t max_rank,
                               std::optional<ClassId> class_restriction) {
  NaiveAggregate out;
  for (const Tree& tree : forest.trees) {
    std::vector<GroupLabel> labels;
    std::function<void(NodeId)> walk = [&](NodeId id) {
      const TreeNode& n = tree.nodes[id];
      if (n.is_leaf()) {
        if (class_restriction && n.prediction != *class_restriction) return;
        std::vector<GroupLabel> path = labels;
        path.push_back(GroupLabel::terminus());
        const std::size_t len = std::min<std::size_t>(path.size(), max_rank);
        ++out.total_paths;
        for (std::size_t i = 0; i < len; ++i) {
          const RankedGroup g{static_cast<std::uint32_t>(i + 1), path[i]};
          ++out.group_totals[g];
          if (i + 1 < len) {
            ++out.edges[{g, RankedGroup{static_cast<std::uint32_t>(i + 2), path[i + 1]}}];
          }
        }
        return;
      }
      labels.push_back(GroupLabel::covariate(n.split_covariate));
      walk(n.left);
      walk(n.right);
      labels.pop_back();
    };
    walk(Tree::kRoot);
  }
  return out;
}

bool same_flows(const FlowAggregate& agg, const NaiveAggregate& naive) {
  return agg.edges == naive.edges && agg.group_totals == naive.group_totals &&
         agg.total_paths == naive.total_paths;
}

bool per_class_sums_match(const ForestModel& forest, std::uint32_t max_rank) {
  const FlowAggregate all = aggregate_flows(forest, max_rank);
  std::map<std::pair<RankedGroup, RankedGroup>, std::uint64_t> edges;
  std::map<RankedGroup, std::uint64_t> totals;
  std::uint64_t paths = 0;
  for (ClassId c = 0; c < forest.n_classes(); ++c) {
    const FlowAggregate part = aggregate_flows(forest, max_rank, c);
    for (const auto& [k, w] : part.edges) edges[k] += w;
    for (const auto& [g, t] : part.group_totals) totals[g] += t;
    paths += part.total_paths;
  }
  return edges == all.edges && totals == all.group_totals && paths == all.total_paths;
}

}  // namespace forestflow::testing
