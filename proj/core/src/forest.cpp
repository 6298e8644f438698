#include "forestflow/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "forestflow/error.hpp"
#include "forestflow/rng.hpp"
#include "parallel.hpp"
#include "split_finder.hpp"

namespace forestflow {

namespace {

struct PendingNode {
  NodeId id;
  std::size_t begin;
  std::size_t end;
};

ClassId majority(std::span<const std::uint32_t> counts) {
  return static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

// Grows one tree on `sample` (bootstrap indices, repeats allowed).
Tree grow_tree(const Dataset& data, const RFConfig& config, std::vector<RowIndex> sample,
               Rng& rng) {
  const std::size_t p = data.n_covariates();
  const std::size_t min_split = 2 * static_cast<std::size_t>(config.min_node_size);
  detail::SplitFinder finder;
  std::vector<CovariateId> pool(p);
  std::vector<std::uint32_t> counts(data.n_classes());

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<PendingNode> stack{{Tree::kRoot, 0, sample.size()}};
  while (!stack.empty()) {
    const PendingNode pending = stack.back();
    stack.pop_back();
    const std::span<RowIndex> rows(sample.data() + pending.begin, pending.end - pending.begin);

    std::fill(counts.begin(), counts.end(), 0);
    for (RowIndex r : rows) ++counts[data.responses[r]];
    const ClassId prediction = majority(counts);
    const bool pure = counts[prediction] == rows.size();
    const bool room = !config.max_nodes || tree.nodes.size() + 2 <= *config.max_nodes;

    std::optional<Split> split;
    if (!pure && rows.size() >= min_split && room) {
      std::iota(pool.begin(), pool.end(), CovariateId{0});
      for (std::size_t i = 0; i < config.mtry; ++i) {
        std::swap(pool[i], pool[i + rng.uniform(p - i)]);
      }
      split = finder.find(data, rows, std::span(pool).first(config.mtry),
                          config.min_node_size);
    }
    if (!split) {
      tree.nodes[pending.id] =
          TreeNode::leaf(prediction, static_cast<std::uint32_t>(rows.size()));
      continue;
    }

    auto mid = std::partition(rows.begin(), rows.end(), [&](RowIndex r) {
      return data.at(r, split->covariate) <= split->threshold;
    });
    const std::size_t split_at = pending.begin + static_cast<std::size_t>(mid - rows.begin());
    const auto left = static_cast<NodeId>(tree.nodes.size());
    const NodeId right = left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[pending.id] =
        TreeNode::internal(split->covariate, split->threshold, left, right,
                           static_cast<std::uint32_t>(rows.size()), split->impurity_decrease);
    stack.push_back({right, split_at, pending.end});
    stack.push_back({left, pending.begin, split_at});
  }
  return tree;
}

}  // namespace

void RFConfig::validate_for(const Dataset& data) const {
  if (n_trees == 0) throw InvalidArgument("n_trees must be positive");
  if (mtry == 0 || mtry > data.n_covariates()) {
    throw InvalidArgument(fmt::format("mtry must be in [1, {}], got {}", data.n_covariates(), mtry));
  }
  if (min_node_size == 0) throw InvalidArgument("min_node_size must be positive");
  if (max_nodes && *max_nodes == 0) throw InvalidArgument("max_nodes must be positive");
  if (bootstrap_size && *bootstrap_size == 0) {
    throw InvalidArgument("bootstrap_size must be positive");
  }
}

std::uint32_t default_mtry(std::size_t n_covariates) {
  auto m = static_cast<std::uint32_t>(std::floor(std::sqrt(static_cast<double>(n_covariates))));
  return std::max<std::uint32_t>(1, m);
}

Execution Execution::from_environment() {
  if (const char* env = std::getenv("FORESTFLOW_THREADS")) {
    try {
      int t = std::stoi(env);
      if (t > 0) return {static_cast<unsigned>(t)};
    } catch (const std::exception&) {
    }
  }
  return {std::max(1u, std::thread::hardware_concurrency())};
}

void ForestModel::validate() const {
  if (class_names.empty()) throw ValidationError("forest has no classes");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    try {
      validate_tree(trees[t], covariate_names.size(), class_names.size());
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("tree {}: {}", t, e.what()));
    }
  }
  if (oob_indices && oob_indices->size() != trees.size()) {
    throw ValidationError(fmt::format("oob table has {} entries for {} trees",
                                      oob_indices->size(), trees.size()));
  }
}

ForestModel train_forest(const Dataset& data, const RFConfig& config, Execution exec) {
  data.validate();
  if (data.n_classes() < 2) throw InvalidArgument("training needs at least 2 classes");
  {
    std::vector<bool> seen(data.n_classes(), false);
    for (ClassId c : data.responses) seen[c] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) {
      throw InvalidArgument("responses contain fewer than 2 distinct classes");
    }
  }
  config.validate_for(data);

  const std::size_t n = data.n_rows();
  const std::size_t sample_size = config.bootstrap_size.value_or(static_cast<std::uint32_t>(n));

  ForestModel forest;
  forest.covariate_names = data.covariate_names;
  forest.class_names = data.class_names;
  forest.config = config;
  forest.trees.resize(config.n_trees);
  forest.oob_indices.emplace(config.n_trees);

  detail::parallel_for(config.n_trees, exec.threads, [&](std::size_t t) {
    Rng rng(derive_seed(config.seed, {t}));
    std::vector<RowIndex> sample(sample_size);
    std::vector<std::uint8_t> in_bag(n, 0);
    for (auto& s : sample) {
      s = static_cast<RowIndex>(rng.uniform(n));
      in_bag[s] = 1;
    }
    auto& oob = (*forest.oob_indices)[t];
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_bag[i]) oob.push_back(static_cast<RowIndex>(i));
    }
    forest.trees[t] = grow_tree(data, config, std::move(sample), rng);
  });
  return forest;
}

Prediction predict(const ForestModel& forest, std::span<const double> row) {
  if (row.size() != forest.n_covariates()) {
    throw InvalidArgument(fmt::format("row has {} values, forest expects {}", row.size(),
                                      forest.n_covariates()));
  }
  if (forest.trees.empty()) throw InvalidArgument("forest has no trees");
  std::vector<std::uint32_t> votes(forest.n_classes(), 0);
  for (const Tree& tree : forest.trees) ++votes[tree.predict(row)];
  Prediction p;
  p.label = majority(votes);
  p.vote_fractions.resize(votes.size());
  const auto total = static_cast<double>(forest.trees.size());
  for (std::size_t k = 0; k < votes.size(); ++k) p.vote_fractions[k] = votes[k] / total;
  return p;
}

double accuracy(const ForestModel& forest, const Dataset& data) {
  if (data.n_rows() == 0) throw InvalidArgument("dataset has no rows");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    if (forest.class_names[predict(forest, data.row(i)).label] ==
        data.class_names[data.responses[i]]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.n_rows());
}

double oob_accuracy(const ForestModel& forest, const Dataset& data, Execution exec) {
  if (!forest.has_oob()) {
    throw InvalidArgument("forest carries no out-of-bag indices (ingested forest?)");
  }
  if (data.n_covariates() != forest.n_covariates()) {
    throw InvalidArgument("dataset and forest disagree on covariate count");
  }
  const auto& oob = *forest.oob_indices;
  const std::size_t k = forest.n_classes();
  const std::size_t n = data.n_rows();

  // Per-tree votes merged in tree order; integer sums make the merge exact.
  std::vector<std::vector<std::pair<RowIndex, ClassId>>> per_tree(forest.n_trees());
  detail::parallel_for(forest.n_trees(), exec.threads, [&](std::size_t t) {
    auto& out = per_tree[t];
    out.reserve(oob[t].size());
    for (RowIndex r : oob[t]) {
      if (r >= n) throw InvalidArgument(fmt::format("oob index {} out of range", r));
      out.emplace_back(r, forest.trees[t].predict(data.row(r)));
    }
  });
  std::vector<std::uint32_t> votes(n * k, 0);
  for (const auto& tree_votes : per_tree) {
    for (auto [r, c] : tree_votes) ++votes[r * k + c];
  }

  std::size_t counted = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const std::uint32_t> v(votes.data() + i * k, k);
    if (std::all_of(v.begin(), v.end(), [](std::uint32_t x) { return x == 0; })) continue;
    ++counted;
    if (forest.class_names[majority(v)] == data.class_names[data.responses[i]]) ++correct;
  }
  if (counted == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(counted);
}

}  // namespace forestflow
