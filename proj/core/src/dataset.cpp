#include "forestflow/dataset.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "forestflow/error.hpp"

namespace forestflow {

void Dataset::validate() const {
  if (n_rows() == 0) throw InvalidArgument("dataset has no rows");
  if (covariate_names.empty()) throw InvalidArgument("dataset has no covariates");
  if (values.size() != n_rows() * n_covariates()) {
    throw InvalidArgument(fmt::format(
        "dataset is not rectangular: {} values for {} rows x {} covariates",
        values.size(), n_rows(), n_covariates()));
  }
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (responses[i] >= class_names.size()) {
      throw InvalidArgument(fmt::format("row {}: response index {} has no class name", i,
                                        responses[i]));
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("dataset contains a non-finite value");
  }
}

Dataset Dataset::from_rows(std::vector<std::string> covariate_names,
                           const std::vector<std::vector<double>>& rows,
                           const std::vector<std::string>& labels) {
  if (rows.size() != labels.size()) {
    throw InvalidArgument(
        fmt::format("{} rows but {} response labels", rows.size(), labels.size()));
  }
  Dataset d;
  d.covariate_names = std::move(covariate_names);
  d.values.reserve(rows.size() * d.covariate_names.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d.covariate_names.size()) {
      throw InvalidArgument(fmt::format("row {} has {} values, expected {}", i,
                                        rows[i].size(), d.covariate_names.size()));
    }
    d.values.insert(d.values.end(), rows[i].begin(), rows[i].end());
    auto cls = find_class(d.class_names, labels[i]);
    if (!cls) {
      cls = static_cast<ClassId>(d.class_names.size());
      d.class_names.push_back(labels[i]);
    }
    d.responses.push_back(*cls);
  }
  return d;
}

Dataset Dataset::subset(std::span<const RowIndex> indices) const {
  Dataset d;
  d.covariate_names = covariate_names;
  d.class_names = class_names;
  d.values.reserve(indices.size() * n_covariates());
  d.responses.reserve(indices.size());
  for (RowIndex i : indices) {
    auto r = row(i);
    d.values.insert(d.values.end(), r.begin(), r.end());
    d.responses.push_back(responses[i]);
  }
  return d;
}

std::optional<ClassId> find_class(std::span<const std::string> class_names,
                                  std::string_view label) {
  auto it = std::find(class_names.begin(), class_names.end(), label);
  if (it == class_names.end()) return std::nullopt;
  return static_cast<ClassId>(it - class_names.begin());
}

std::optional<CovariateId> find_covariate(std::span<const std::string> covariate_names,
                                          std::string_view name) {
  auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
  if (it == covariate_names.end()) return std::nullopt;
  return static_cast<CovariateId>(it - covariate_names.begin());
}

}  // namespace forestflow
