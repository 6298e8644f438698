#include "forestflow/importance.hpp"

#include <vector>

#include <fmt/format.h>

#include "forestflow/error.hpp"
#include "forestflow/rng.hpp"
#include "parallel.hpp"

namespace forestflow {

std::vector<double> impurity_importance(const ForestModel& forest) {
  std::vector<double> out(forest.n_covariates(), 0.0);
  if (forest.trees.empty()) return out;
  for (const Tree& tree : forest.trees) {
    const double root_n = tree.root().n_train;
    if (root_n <= 0) continue;
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) continue;
      out[node.split_covariate] += node.impurity_decrease * (node.n_train / root_n);
    }
  }
  for (double& v : out) v /= static_cast<double>(forest.n_trees());
  return out;
}

std::vector<double> permutation_importance(const ForestModel& forest, const Dataset& data,
                                           std::uint32_t repeats, std::uint64_t seed,
                                           Execution exec) {
  if (!forest.has_oob()) {
    throw InvalidArgument("forest carries no out-of-bag indices (ingested forest?)");
  }
  if (repeats == 0) throw InvalidArgument("repeats must be positive");
  if (data.n_covariates() != forest.n_covariates()) {
    throw InvalidArgument("dataset and forest disagree on covariate count");
  }
  const std::size_t p = forest.n_covariates();
  const auto& oob = *forest.oob_indices;

  // Map data classes onto forest classes by name.
  std::vector<std::optional<ClassId>> to_forest(data.n_classes());
  for (std::size_t c = 0; c < data.n_classes(); ++c) {
    to_forest[c] = find_class(forest.class_names, data.class_names[c]);
  }

  // drops[t][j]: accuracy decrease of tree t for covariate j.
  std::vector<std::vector<double>> drops(forest.n_trees());
  std::vector<std::uint8_t> has_oob(forest.n_trees(), 0);
  detail::parallel_for(forest.n_trees(), exec.threads, [&](std::size_t t) {
    const Tree& tree = forest.trees[t];
    const auto& rows = oob[t];
    drops[t].assign(p, 0.0);
    if (rows.empty()) return;
    has_oob[t] = 1;

    std::vector<std::uint8_t> used(p, 0);
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) used[node.split_covariate] = 1;
    }
    auto is_correct = [&](RowIndex r, std::span<const double> x) {
      return to_forest[data.responses[r]] == tree.predict(x);
    };
    std::size_t base_correct = 0;
    for (RowIndex r : rows) base_correct += is_correct(r, data.row(r));

    const double m = static_cast<double>(rows.size());
    std::vector<double> column(rows.size());
    std::vector<double> scratch(p);
    for (std::size_t j = 0; j < p; ++j) {
      // Routing never reads an unused covariate, so the drop is exactly 0.
      if (!used[j]) continue;
      double total = 0.0;
      for (std::uint32_t rep = 0; rep < repeats; ++rep) {
        for (std::size_t i = 0; i < rows.size(); ++i) column[i] = data.at(rows[i], j);
        Rng rng(derive_seed(seed, {t, j, rep}));
        rng.shuffle(std::span(column));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          auto x = data.row(rows[i]);
          std::copy(x.begin(), x.end(), scratch.begin());
          scratch[j] = column[i];
          correct += is_correct(rows[i], scratch);
        }
        total += (static_cast<double>(base_correct) - static_cast<double>(correct)) / m;
      }
      drops[t][j] = total / repeats;
    }
  });

  std::vector<double> out(p, 0.0);
  std::size_t counted = 0;
  for (std::size_t t = 0; t < forest.n_trees(); ++t) {
    if (!has_oob[t]) continue;
    ++counted;
    for (std::size_t j = 0; j < p; ++j) out[j] += drops[t][j];
  }
  if (counted > 0) {
    for (double& v : out) v /= static_cast<double>(counted);
  }
  return out;
}

ImportanceReport importance_report(const ForestModel& forest, const Dataset& data,
                                   std::uint32_t repeats, std::uint64_t seed, Execution exec) {
  ImportanceReport report;
  report.covariate_names = forest.covariate_names;
  report.impurity = impurity_importance(forest);
  report.permutation = permutation_importance(forest, data, repeats, seed, exec);
  return report;
}

}  // namespace forestflow
