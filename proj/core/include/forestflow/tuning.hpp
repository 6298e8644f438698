#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forestflow/dataset.hpp"
#include "forestflow/forest.hpp"

namespace forestflow {

// Fold id per row. Rows of each class are shuffled and dealt round-robin so
// every fold holds each class in near-global proportion.
std::vector<std::uint32_t> stratified_folds(const Dataset& data,
                                            std::uint32_t n_folds,
                                            std::uint64_t seed);

struct MtryScore {
  std::uint32_t mtry = 0;
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;

  bool operator==(const MtryScore&) const = default;
};

struct TuneResult {
  std::uint32_t selected_mtry = 0;
  std::vector<MtryScore> scores;  // in candidate order

  bool operator==(const TuneResult&) const = default;
};

// Stratified k-fold selection of mtry. The highest mean held-out accuracy
// wins; ties go to the smaller mtry. Every candidate sees the same folds and
// the same per-fold seeds.
TuneResult tune_mtry(const Dataset& data,
                     std::span<const std::uint32_t> candidates,
                     std::uint32_t n_folds, const RFConfig& base_config,
                     Execution exec = {});

}  // namespace forestflow
