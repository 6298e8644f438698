#include "forestflow/forest_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include "json.hpp"

#include "csv.hpp"
#include "forestflow/error.hpp"
#include "forestflow/io.hpp"

namespace forestflow {

using json = nlohmann::ordered_json;

namespace {

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "?";
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && end == s.data() + s.size()) return v;
  // Exported tables sometimes write integers as reals ("1.0").
  auto d = parse_number(s);
  if (d && std::floor(*d) == *d && std::fabs(*d) < 1e15) return static_cast<long long>(*d);
  return std::nullopt;
}

}  // namespace

Dataset parse_dataset(std::string_view text, std::string_view response_column,
                      std::optional<std::vector<std::string>> covariate_columns) {
  const auto records = detail::parse_csv(text);
  if (records.empty()) throw ParseError("dataset has no header row");
  const auto& header = records.front().fields;
  {
    std::set<std::string> seen;
    for (const auto& h : header) {
      if (h.empty()) throw ParseError("dataset header has an empty column name");
      if (!seen.insert(h).second) throw ParseError(fmt::format("duplicate column '{}'", h));
    }
  }
  auto column_of = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  const auto response_col = column_of(response_column);
  if (!response_col) {
    throw InvalidArgument(fmt::format("response column '{}' not in header", response_column));
  }
  std::vector<std::size_t> cov_cols;
  std::vector<std::string> cov_names;
  if (covariate_columns) {
    for (const auto& name : *covariate_columns) {
      if (name == response_column) {
        throw InvalidArgument(
            fmt::format("response column '{}' cannot also be a covariate", name));
      }
      auto c = column_of(name);
      if (!c) throw InvalidArgument(fmt::format("covariate column '{}' not in header", name));
      cov_cols.push_back(*c);
      cov_names.push_back(name);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *response_col) continue;
      cov_cols.push_back(c);
      cov_names.push_back(header[c]);
    }
  }
  if (cov_cols.empty()) throw InvalidArgument("dataset has no covariate columns");

  Dataset d;
  d.covariate_names = std::move(cov_names);
  d.values.reserve((records.size() - 1) * cov_cols.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw ParseError(fmt::format("line {}: {} fields, header has {}", rec.line,
                                   rec.fields.size(), header.size()));
    }
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const std::string& cell = rec.fields[cov_cols[k]];
      if (is_missing_token(cell)) {
        throw ParseError(fmt::format("line {} (row {}), column '{}': missing value", rec.line,
                                     r, header[cov_cols[k]]));
      }
      auto v = parse_number(cell);
      if (!v) {
        throw ParseError(fmt::format("line {} (row {}), column '{}': non-numeric value '{}'",
                                     rec.line, r, header[cov_cols[k]], cell));
      }
      d.values.push_back(*v);
    }
    const std::string& label = rec.fields[*response_col];
    if (is_missing_token(label)) {
      throw ParseError(fmt::format("line {} (row {}), column '{}': missing value", rec.line, r,
                                   header[*response_col]));
    }
    auto cls = find_class(d.class_names, label);
    if (!cls) {
      cls = static_cast<ClassId>(d.class_names.size());
      d.class_names.push_back(label);
    }
    d.responses.push_back(*cls);
  }
  if (d.n_rows() == 0) throw ParseError("dataset has a header but no rows");
  return d;
}

Dataset read_dataset(const std::filesystem::path& path, std::string_view response_column,
                     std::optional<std::vector<std::string>> covariate_columns) {
  try {
    return parse_dataset(read_file(path), response_column, std::move(covariate_columns));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

// ---------------------------------------------------------------------------
// ForestDocument

namespace {

json config_to_json(const RFConfig& c) {
  json j;
  j["n_trees"] = c.n_trees;
  j["mtry"] = c.mtry;
  j["min_node_size"] = c.min_node_size;
  j["max_nodes"] = c.max_nodes ? json(*c.max_nodes) : json(nullptr);
  j["seed"] = c.seed;
  j["bootstrap_size"] = c.bootstrap_size ? json(*c.bootstrap_size) : json(nullptr);
  return j;
}

RFConfig config_from_json(const json& j) {
  RFConfig c;
  c.n_trees = j.at("n_trees").get<std::uint32_t>();
  c.mtry = j.at("mtry").get<std::uint32_t>();
  c.min_node_size = j.at("min_node_size").get<std::uint32_t>();
  if (j.contains("max_nodes") && !j["max_nodes"].is_null()) {
    c.max_nodes = j["max_nodes"].get<std::uint32_t>();
  }
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("bootstrap_size") && !j["bootstrap_size"].is_null()) {
    c.bootstrap_size = j["bootstrap_size"].get<std::uint32_t>();
  }
  return c;
}

json tree_to_json(const Tree& tree, const ForestModel& forest) {
  json nodes = json::array();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    json j;
    j["id"] = i;
    if (n.is_leaf()) {
      j["kind"] = "leaf";
      j["class"] = forest.class_names.at(n.prediction);
      j["n_train"] = n.n_train;
    } else {
      j["kind"] = "internal";
      j["covariate"] = forest.covariate_names.at(n.split_covariate);
      j["threshold"] = n.split_threshold;
      j["left"] = n.left;
      j["right"] = n.right;
      j["n_train"] = n.n_train;
      j["impurity_decrease"] = n.impurity_decrease;
    }
    nodes.push_back(std::move(j));
  }
  json t;
  t["nodes"] = std::move(nodes);
  return t;
}

Tree tree_from_json(const json& j, const ForestModel& forest, std::size_t tree_index) {
  Tree tree;
  const json& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) {
    throw ParseError(fmt::format("tree {}: 'nodes' must be a nonempty array", tree_index));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& nj = nodes[i];
    if (nj.at("id").get<std::size_t>() != i) {
      throw ParseError(fmt::format("tree {}: node at position {} has id {}", tree_index, i,
                                   nj.at("id").dump()));
    }
    const auto kind = nj.at("kind").get<std::string>();
    const auto n_train = nj.value("n_train", std::uint32_t{0});
    if (kind == "leaf") {
      const auto label = nj.at("class").get<std::string>();
      auto cls = find_class(forest.class_names, label);
      if (!cls) {
        throw ValidationError(fmt::format("tree {} node {}: class '{}' not in class_names",
                                          tree_index, i, label));
      }
      tree.nodes.push_back(TreeNode::leaf(*cls, n_train));
    } else if (kind == "internal") {
      const auto name = nj.at("covariate").get<std::string>();
      auto cov = find_covariate(forest.covariate_names, name);
      if (!cov) {
        throw ValidationError(fmt::format(
            "tree {} node {}: covariate '{}' not in covariate_names", tree_index, i, name));
      }
      tree.nodes.push_back(TreeNode::internal(
          *cov, nj.at("threshold").get<double>(), nj.at("left").get<NodeId>(),
          nj.at("right").get<NodeId>(), n_train, nj.value("impurity_decrease", 0.0)));
    } else {
      throw ParseError(fmt::format("tree {} node {}: unknown kind '{}'", tree_index, i, kind));
    }
  }
  return tree;
}

}  // namespace

std::string serialize_forest(const ForestModel& forest) {
  std::string out = "{\n";
  out += fmt::format(" \"format_version\": {},\n", json(kForestFormatVersion).dump());
  out += fmt::format(" \"covariate_names\": {},\n", json(forest.covariate_names).dump());
  out += fmt::format(" \"class_names\": {},\n", json(forest.class_names).dump());
  out += fmt::format(" \"config\": {},\n",
                     forest.config ? config_to_json(*forest.config).dump() : "null");
  out += " \"trees\": [";
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    out += t == 0 ? "\n  " : ",\n  ";
    out += tree_to_json(forest.trees[t], forest).dump();
  }
  out += forest.trees.empty() ? "],\n" : "\n ],\n";
  if (forest.oob_indices) {
    out += " \"oob_indices\": [";
    for (std::size_t t = 0; t < forest.oob_indices->size(); ++t) {
      out += t == 0 ? "\n  " : ",\n  ";
      out += json((*forest.oob_indices)[t]).dump();
    }
    out += forest.oob_indices->empty() ? "]\n" : "\n ]\n";
  } else {
    out += " \"oob_indices\": null\n";
  }
  out += "}\n";
  return out;
}

ForestModel parse_forest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("forest document is not valid JSON: {}", e.what()));
  }
  ForestModel forest;
  try {
    if (!doc.is_object()) throw ParseError("forest document must be a JSON object");
    const auto version = doc.at("format_version").get<std::string>();
    if (version != kForestFormatVersion) {
      throw ParseError(fmt::format("unknown forest format_version '{}' (supported: {})", version,
                                   kForestFormatVersion));
    }
    forest.covariate_names = doc.at("covariate_names").get<std::vector<std::string>>();
    forest.class_names = doc.at("class_names").get<std::vector<std::string>>();
    if (doc.contains("config") && !doc["config"].is_null()) {
      forest.config = config_from_json(doc["config"]);
    }
    const json& trees = doc.at("trees");
    if (!trees.is_array()) throw ParseError("'trees' must be an array");
    for (std::size_t t = 0; t < trees.size(); ++t) {
      forest.trees.push_back(tree_from_json(trees[t], forest, t));
    }
    if (doc.contains("oob_indices") && !doc["oob_indices"].is_null()) {
      forest.oob_indices = doc["oob_indices"].get<std::vector<std::vector<RowIndex>>>();
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed forest document: {}", e.what()));
  }
  forest.validate();
  return forest;
}

void write_forest(const ForestModel& forest, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_forest(forest));
}

ForestModel read_forest(const std::filesystem::path& path) {
  return parse_forest(read_file(path));
}

// ---------------------------------------------------------------------------
// Node tables

namespace {

std::string normalise_column(std::string_view name) {
  std::string s = detail::to_lower(name);
  for (char& c : s) {
    if (c == '_' || c == '.') c = ' ';
  }
  return s;
}

}  // namespace

Tree parse_node_table(std::string_view text, std::span<const std::string> covariate_names,
                      std::span<const std::string> class_names, NodeTableOptions options) {
  const auto records = detail::parse_csv(text);
  if (records.empty()) throw ParseError("node table has no header row");

  constexpr std::string_view kColumns[] = {"left daughter", "right daughter", "split var",
                                           "split point",   "status",         "prediction"};
  enum { kLeft, kRight, kVar, kPoint, kStatus, kPred };
  std::size_t col[6];
  const auto& header = records.front().fields;
  for (std::size_t k = 0; k < 6; ++k) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
      return normalise_column(h) == kColumns[k];
    });
    if (it == header.end()) {
      throw ParseError(fmt::format("node table lacks column '{}'", kColumns[k]));
    }
    col[k] = static_cast<std::size_t>(it - header.begin());
  }

  const std::size_t n = records.size() - 1;
  if (n == 0) throw ParseError("node table has no rows");
  Tree tree;
  tree.nodes.reserve(n);
  for (std::size_t r = 1; r <= n; ++r) {
    const auto& rec = records[r];
    auto where = [&] { return fmt::format("node table line {} (node {})", rec.line, r); };
    if (rec.fields.size() != header.size()) {
      throw ParseError(fmt::format("{}: {} fields, header has {}", where(), rec.fields.size(),
                                   header.size()));
    }
    auto integer = [&](std::size_t c) -> long long {
      const std::string& cell = rec.fields[col[c]];
      if (is_missing_token(cell)) return 0;
      auto v = parse_integer(cell);
      if (!v) {
        throw ParseError(fmt::format("{}: column '{}' is not an integer: '{}'", where(),
                                     kColumns[c], cell));
      }
      return *v;
    };
    const long long left = integer(kLeft);
    const long long right = integer(kRight);
    const long long status = integer(kStatus);
    const std::string& pred = rec.fields[col[kPred]];

    if (status == -1) {
      if (left != 0 || right != 0) {
        throw ParseError(fmt::format("{}: leaf row has nonzero daughters", where()));
      }
      std::optional<ClassId> cls = find_class(class_names, pred);
      if (!cls) {
        auto idx = parse_integer(pred);
        if (idx && *idx >= 1 && static_cast<std::size_t>(*idx) <= class_names.size()) {
          cls = static_cast<ClassId>(*idx - 1);
        }
      }
      if (!cls) {
        throw ValidationError(
            fmt::format("{}: prediction '{}' is not a known class", where(), pred));
      }
      tree.nodes.push_back(TreeNode::leaf(*cls));
      continue;
    }

    if (left == 0 || right == 0) {
      throw ParseError(fmt::format(
          "{}: internal row (status {}) is missing a daughter; leaves need status -1", where(),
          status));
    }
    if (options.strict && !is_missing_token(pred) && pred != "0") {
      throw ParseError(fmt::format("{}: internal row has prediction '{}'", where(), pred));
    }
    auto out_of_range = [&](long long d) { return d < 1 || static_cast<std::size_t>(d) > n; };
    if (out_of_range(left) || out_of_range(right)) {
      throw ValidationError(fmt::format("{}: daughter index out of range [1, {}]", where(), n));
    }
    const std::string& var = rec.fields[col[kVar]];
    std::optional<CovariateId> cov = find_covariate(covariate_names, var);
    if (!cov) {
      auto idx = parse_integer(var);
      if (!idx || *idx < 1 || static_cast<std::size_t>(*idx) > covariate_names.size()) {
        throw ValidationError(fmt::format("{}: split var '{}' out of range [1, {}]", where(),
                                          var, covariate_names.size()));
      }
      cov = static_cast<CovariateId>(*idx - 1);
    }
    auto point = parse_number(rec.fields[col[kPoint]]);
    if (!point) {
      throw ParseError(fmt::format("{}: split point '{}' is not a number", where(),
                                   rec.fields[col[kPoint]]));
    }
    tree.nodes.push_back(TreeNode::internal(*cov, *point, static_cast<NodeId>(left - 1),
                                            static_cast<NodeId>(right - 1)));
  }
  validate_tree(tree, covariate_names.size(), class_names.size());
  return tree;
}

ForestModel read_node_table(const std::filesystem::path& path,
                            std::vector<std::string> covariate_names,
                            std::vector<std::string> class_names, NodeTableOptions options) {
  return read_node_tables(std::span(&path, 1), std::move(covariate_names), std::move(class_names),
                          options);
}

ForestModel read_node_tables(std::span<const std::filesystem::path> paths,
                             std::vector<std::string> covariate_names,
                             std::vector<std::string> class_names, NodeTableOptions options) {
  ForestModel forest;
  forest.covariate_names = std::move(covariate_names);
  forest.class_names = std::move(class_names);
  for (const auto& p : paths) {
    try {
      forest.trees.push_back(parse_node_table(read_file(p), forest.covariate_names,
                                              forest.class_names, options));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}: {}", p.string(), e.what()));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: {}", p.string(), e.what()));
    }
  }
  return forest;
}

}  // namespace forestflow
