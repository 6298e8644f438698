#pragma once

#include <random>
#include <string>
#include <vector>

#include "forestflow/dataset.hpp"

namespace forestflow::bench {

// Four classes decided by the signs of the first two covariates; the rest are
// noise.
inline Dataset synthetic(std::size_t n_rows, std::size_t n_covariates, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n_covariates; ++j) names.push_back("x." + std::to_string(j + 1));
  std::vector<std::vector<double>> rows(n_rows, std::vector<double>(n_covariates));
  std::vector<std::string> labels;
  for (auto& row : rows) {
    for (double& v : row) v = u(gen);
    labels.push_back(std::to_string((row[0] > 0) * 2 + (row[1] > 0)));
  }
  return Dataset::from_rows(std::move(names), rows, labels);
}

}  // namespace forestflow::bench
