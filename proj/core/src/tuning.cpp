#include "forestflow/tuning.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "forestflow/error.hpp"
#include "forestflow/rng.hpp"

namespace forestflow {

std::vector<std::uint32_t> stratified_folds(const Dataset& data, std::uint32_t n_folds,
                                            std::uint64_t seed) {
  if (n_folds < 2) throw InvalidArgument("n_folds must be at least 2");
  std::vector<std::vector<RowIndex>> by_class(data.n_classes());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    by_class[data.responses[i]].push_back(static_cast<RowIndex>(i));
  }
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (!by_class[c].empty() && by_class[c].size() < n_folds) {
      throw InvalidArgument(fmt::format("class '{}' has {} members, fewer than {} folds",
                                        data.class_names[c], by_class[c].size(), n_folds));
    }
  }
  // Deal class by class, continuing the rotation so fold sizes stay within
  // one of each other.
  std::vector<std::uint32_t> fold(data.n_rows(), 0);
  std::size_t dealt = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng rng(derive_seed(seed, {0xf01d, c}));
    rng.shuffle(std::span(by_class[c]));
    for (RowIndex r : by_class[c]) fold[r] = static_cast<std::uint32_t>(dealt++ % n_folds);
  }
  return fold;
}

TuneResult tune_mtry(const Dataset& data, std::span<const std::uint32_t> candidates,
                     std::uint32_t n_folds, const RFConfig& base_config, Execution exec) {
  if (candidates.empty()) throw InvalidArgument("no mtry candidates");
  for (std::uint32_t m : candidates) {
    if (m == 0 || m > data.n_covariates()) {
      throw InvalidArgument(
          fmt::format("mtry candidate {} outside [1, {}]", m, data.n_covariates()));
    }
  }
  data.validate();
  const auto fold = stratified_folds(data, n_folds, base_config.seed);

  std::vector<std::vector<RowIndex>> train_rows(n_folds), test_rows(n_folds);
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::uint32_t f = 0; f < n_folds; ++f) {
      (fold[i] == f ? test_rows : train_rows)[f].push_back(static_cast<RowIndex>(i));
    }
  }
  std::vector<Dataset> train_sets, test_sets;
  for (std::uint32_t f = 0; f < n_folds; ++f) {
    train_sets.push_back(data.subset(train_rows[f]));
    test_sets.push_back(data.subset(test_rows[f]));
  }

  TuneResult result;
  for (std::uint32_t m : candidates) {
    MtryScore score{m, 0.0, {}};
    for (std::uint32_t f = 0; f < n_folds; ++f) {
      RFConfig cfg = base_config;
      cfg.mtry = m;
      cfg.seed = derive_seed(base_config.seed, {f});
      // The bootstrap defaults to the size of each training fold.
      if (cfg.bootstrap_size && *cfg.bootstrap_size > train_sets[f].n_rows()) {
        cfg.bootstrap_size.reset();
      }
      const ForestModel forest = train_forest(train_sets[f], cfg, exec);
      score.fold_accuracy.push_back(accuracy(forest, test_sets[f]));
    }
    double sum = 0.0;
    for (double a : score.fold_accuracy) sum += a;
    score.mean_accuracy = sum / n_folds;
    result.scores.push_back(std::move(score));
  }

  const MtryScore* best = &result.scores.front();
  for (const auto& s : result.scores) {
    if (s.mean_accuracy > best->mean_accuracy ||
        (s.mean_accuracy == best->mean_accuracy && s.mtry < best->mtry)) {
      best = &s;
    }
  }
  result.selected_mtry = best->mtry;
  return result;
}

}  // namespace forestflow
