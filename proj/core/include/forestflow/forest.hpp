#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forestflow/dataset.hpp"
#include "forestflow/tree.hpp"

namespace forestflow {

struct RFConfig {
  std::uint32_t n_trees = 500;
  std::uint32_t mtry = 1;
  std::uint32_t min_node_size = 1;
  std::optional<std::uint32_t> max_nodes;
  std::uint64_t seed = 0;
  // Defaults to the number of observations.
  std::optional<std::uint32_t> bootstrap_size;

  // Throws InvalidArgument if the config cannot be used with `data`.
  void validate_for(const Dataset& data) const;

  bool operator==(const RFConfig&) const = default;
};

// floor(sqrt(p)), at least 1.
std::uint32_t default_mtry(std::size_t n_covariates);

// Worker threads for per-tree work. Results never depend on this value.
struct Execution {
  unsigned threads = 1;

  // Reads FORESTFLOW_THREADS; falls back to the hardware concurrency.
  static Execution from_environment();
};

struct ForestModel {
  std::vector<Tree> trees;
  std::vector<std::string> covariate_names;
  std::vector<std::string> class_names;
  // Both absent for forests ingested from foreign software.
  std::optional<RFConfig> config;
  std::optional<std::vector<std::vector<RowIndex>>> oob_indices;

  std::size_t n_trees() const { return trees.size(); }
  std::size_t n_covariates() const { return covariate_names.size(); }
  std::size_t n_classes() const { return class_names.size(); }
  bool has_oob() const { return oob_indices.has_value(); }

  // Validates every tree and the oob index table. Throws ValidationError.
  void validate() const;

  bool operator==(const ForestModel&) const = default;
};

struct Split {
  CovariateId covariate = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;

  bool operator==(const Split&) const = default;
};

// Exhaustive Gini split search over `rows` (indices into data, repeats
// allowed) and the candidate covariates. Thresholds are midpoints between
// consecutive distinct values. Returns nullopt when no split has a strictly
// positive impurity decrease or when no threshold leaves at least
// `min_child_size` rows on both sides. Ties go to the lowest covariate index,
// then the lowest threshold.
std::optional<Split> best_split(const Dataset& data,
                                std::span<const RowIndex> rows,
                                std::span<const CovariateId> candidates,
                                std::uint32_t min_child_size = 1);

// Gini impurity of a class-count vector.
double gini(std::span<const std::uint32_t> class_counts);

ForestModel train_forest(const Dataset& data, const RFConfig& config,
                         Execution exec = {});

struct Prediction {
  ClassId label = 0;
  std::vector<double> vote_fractions;
};

// Majority vote; ties go to the class listed first in class_names.
Prediction predict(const ForestModel& forest, std::span<const double> row);

// Fraction of held-out rows predicted correctly by a forest.
double accuracy(const ForestModel& forest, const Dataset& data);

// Out-of-bag accuracy. Rows that are in-bag for every tree are excluded from
// the denominator. Throws InvalidArgument when the forest has no oob table.
double oob_accuracy(const ForestModel& forest, const Dataset& data,
                    Execution exec = {});

}  // namespace forestflow
