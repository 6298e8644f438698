#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forestflow/dataset.hpp"
#include "forestflow/forest.hpp"

namespace forestflow {

struct ImportanceReport {
  std::vector<std::string> covariate_names;
  // Mean over trees of the sample-weighted Gini decrease.
  std::vector<double> impurity;
  // Mean drop in per-tree OOB accuracy; empty when not computed.
  std::vector<double> permutation;

  bool operator==(const ImportanceReport&) const = default;
};

// Sum over internal nodes of impurity_decrease * n_train(node) / n_train(root)
// per covariate, divided by the number of trees.
std::vector<double> impurity_importance(const ForestModel& forest);

// Per tree: accuracy on its OOB rows minus accuracy after permuting one
// covariate among those rows; averaged over trees with a nonempty OOB set and
// over `repeats` permutations. Deterministic in `seed`.
std::vector<double> permutation_importance(const ForestModel& forest,
                                           const Dataset& data,
                                           std::uint32_t repeats,
                                           std::uint64_t seed,
                                           Execution exec = {});

// Both metrics in one report.
ImportanceReport importance_report(const ForestModel& forest,
                                   const Dataset& data, std::uint32_t repeats,
                                   std::uint64_t seed, Execution exec = {});

}  // namespace forestflow
