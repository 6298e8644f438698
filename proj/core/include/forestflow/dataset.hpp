#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forestflow {

using ClassId = std::uint32_t;
using CovariateId = std::uint32_t;
using RowIndex = std::uint32_t;

// Numeric covariates with a categorical response. Values are stored
// row-major; responses index into class_names.
struct Dataset {
  std::vector<std::string> covariate_names;
  std::vector<std::string> class_names;
  std::vector<double> values;
  std::vector<ClassId> responses;

  std::size_t n_rows() const { return responses.size(); }
  std::size_t n_covariates() const { return covariate_names.size(); }
  std::size_t n_classes() const { return class_names.size(); }

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * n_covariates(), n_covariates()};
  }
  double at(std::size_t row, std::size_t col) const {
    return values[row * n_covariates() + col];
  }

  // Throws InvalidArgument when the shape or labels are inconsistent.
  void validate() const;

  // Builds a dataset from per-row vectors and text labels; class_names are
  // ordered by first appearance.
  static Dataset from_rows(std::vector<std::string> covariate_names,
                           const std::vector<std::vector<double>>& rows,
                           const std::vector<std::string>& labels);

  // Rows in `indices`, in that order.
  Dataset subset(std::span<const RowIndex> indices) const;

  bool operator==(const Dataset&) const = default;
};

std::optional<ClassId> find_class(std::span<const std::string> class_names,
                                  std::string_view label);

std::optional<CovariateId> find_covariate(
    std::span<const std::string> covariate_names, std::string_view name);

}  // namespace forestflow
