#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forestflow/dataset.hpp"
#include "forestflow/forest.hpp"

namespace forestflow {

inline constexpr std::string_view kForestFormatVersion = "1";

// Comma-separated text with a header row. `response_column` becomes the
// class label; the covariates are `covariate_columns` when given, otherwise
// every other column. Classes are ordered by first appearance.
Dataset parse_dataset(std::string_view text, std::string_view response_column,
                      std::optional<std::vector<std::string>> covariate_columns =
                          std::nullopt);

Dataset read_dataset(const std::filesystem::path& path,
                     std::string_view response_column,
                     std::optional<std::vector<std::string>> covariate_columns =
                         std::nullopt);

// ForestDocument (JSON, format_version "1"). Field order is fixed and
// thresholds round-trip exactly.
std::string serialize_forest(const ForestModel& forest);
ForestModel parse_forest(std::string_view text);

void write_forest(const ForestModel& forest, const std::filesystem::path& path);
ForestModel read_forest(const std::filesystem::path& path);

struct NodeTableOptions {
  // Reject internal rows whose prediction column is set.
  bool strict = false;
};

// One tree from a node table in the layout exported by the reference random
// forest software: columns "left daughter", "right daughter", "split var",
// "split point", "status", "prediction" (case-insensitive; '.' and '_' are
// read as spaces). Row k is node k (1-based); status -1 marks a leaf and a
// daughter of 0 means none. "split var" is a 1-based covariate index or a
// covariate name; "prediction" a class name or 1-based class index.
Tree parse_node_table(std::string_view text,
                      std::span<const std::string> covariate_names,
                      std::span<const std::string> class_names,
                      NodeTableOptions options = {});

// Single-tree forest without config or oob table.
ForestModel read_node_table(const std::filesystem::path& path,
                            std::vector<std::string> covariate_names,
                            std::vector<std::string> class_names,
                            NodeTableOptions options = {});

// One tree per table.
ForestModel read_node_tables(std::span<const std::filesystem::path> paths,
                             std::vector<std::string> covariate_names,
                             std::vector<std::string> class_names,
                             NodeTableOptions options = {});

}  // namespace forestflow
