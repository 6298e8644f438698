#include "forestflow/flow_document.hpp"

#include <fmt/format.h>

#include "forestflow/error.hpp"
#include "forestflow/io.hpp"
#include "json.hpp"

namespace forestflow {

using json = nlohmann::ordered_json;

std::string group_id(const RankedGroup& g) {
  if (g.label.is_terminus()) return fmt::format("{}:T", g.rank);
  return fmt::format("{}:{}", g.rank, g.label.covariate_id());
}

namespace {

json aggregate_to_json(const FlowAggregate& agg) {
  json j;
  j["class"] = agg.class_restriction ? json(agg.class_names.at(*agg.class_restriction))
                                     : json(nullptr);
  j["n_trees"] = agg.n_trees;
  j["total_paths"] = agg.total_paths;
  j["threshold"] = agg.threshold;
  j["residual"] = agg.residual;
  json groups = json::array();
  for (const auto& [g, total] : agg.group_totals) {
    json gj;
    gj["id"] = group_id(g);
    gj["rank"] = g.rank;
    gj["covariate"] = g.label.is_terminus() ? json(nullptr) : json(g.label.covariate_id());
    gj["total"] = total;
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  json edges = json::array();
  for (const auto& [key, w] : agg.edges) {
    json ej;
    ej["from"] = group_id(key.first);
    ej["to"] = group_id(key.second);
    ej["weight"] = w;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  return j;
}

RankedGroup group_from_id(const std::string& id, std::size_t n_covariates) {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw ParseError(fmt::format("bad group id '{}'", id));
  RankedGroup g;
  try {
    g.rank = static_cast<std::uint32_t>(std::stoul(id.substr(0, colon)));
    const std::string rest = id.substr(colon + 1);
    if (rest == "T") {
      g.label = GroupLabel::terminus();
    } else {
      const auto c = std::stoul(rest);
      if (c >= n_covariates) throw ParseError(fmt::format("group id '{}' out of range", id));
      g.label = GroupLabel::covariate(static_cast<CovariateId>(c));
    }
  } catch (const std::logic_error&) {
    throw ParseError(fmt::format("bad group id '{}'", id));
  }
  if (g.rank == 0) throw ParseError(fmt::format("group id '{}' has rank 0", id));
  return g;
}

FlowAggregate aggregate_from_json(const json& j, const FlowAggregate& shape) {
  FlowAggregate agg = shape;
  const json& cls = j.at("class");
  if (!cls.is_null()) {
    auto c = find_class(agg.class_names, cls.get<std::string>());
    if (!c) throw ParseError(fmt::format("unknown class '{}'", cls.get<std::string>()));
    agg.class_restriction = *c;
  }
  agg.n_trees = j.at("n_trees").get<std::uint64_t>();
  agg.total_paths = j.at("total_paths").get<std::uint64_t>();
  agg.threshold = j.at("threshold").get<double>();
  agg.residual = j.at("residual").get<std::vector<double>>();
  for (const json& gj : j.at("groups")) {
    const RankedGroup g = group_from_id(gj.at("id").get<std::string>(), agg.covariate_names.size());
    agg.group_totals[g] = gj.at("total").get<std::uint64_t>();
  }
  for (const json& ej : j.at("edges")) {
    const RankedGroup from =
        group_from_id(ej.at("from").get<std::string>(), agg.covariate_names.size());
    const RankedGroup to = group_from_id(ej.at("to").get<std::string>(), agg.covariate_names.size());
    agg.edges[{from, to}] = ej.at("weight").get<std::uint64_t>();
  }
  return agg;
}

}  // namespace

FlowDocument build_flow_document(const ForestModel& forest, std::uint32_t max_rank,
                                 std::optional<ClassId> class_restriction, double theta,
                                 Execution exec) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument(fmt::format("threshold must be in [0, 1], got {}", theta));
  }
  FlowDocument doc;
  doc.all = aggregate_flows(forest, max_rank, std::nullopt, exec);
  for (ClassId c = 0; c < forest.n_classes(); ++c) {
    doc.by_class.push_back(aggregate_flows(forest, max_rank, c, exec));
  }
  doc.view = apply_threshold(class_restriction ? doc.by_class.at(*class_restriction) : doc.all,
                             theta);
  return doc;
}

std::string serialize_flow_document(const FlowDocument& doc) {
  const FlowAggregate& v = doc.view;
  json j;
  j["format_version"] = kFlowFormatVersion;
  j["semantics"] = {{"terminus_absorbing", true},
                    {"path_weighting", "unweighted"},
                    {"group_identity", "rank,covariate_index"}};
  j["n_trees"] = doc.all.n_trees;
  j["max_rank"] = v.max_rank;
  j["covariate_names"] = v.covariate_names;
  j["class_names"] = v.class_names;
  j["class_restriction"] =
      v.class_restriction ? json(v.class_names.at(*v.class_restriction)) : json(nullptr);
  j["threshold"] = v.threshold;
  j["view"] = aggregate_to_json(v);
  j["all"] = aggregate_to_json(doc.all);
  json by_class = json::array();
  for (const auto& a : doc.by_class) by_class.push_back(aggregate_to_json(a));
  j["by_class"] = std::move(by_class);
  return j.dump() + "\n";
}

FlowDocument parse_flow_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("flow document is not valid JSON: {}", e.what()));
  }
  FlowDocument doc;
  try {
    const auto version = j.at("format_version").get<std::string>();
    if (version != kFlowFormatVersion) {
      throw ParseError(fmt::format("unknown flow format_version '{}'", version));
    }
    FlowAggregate shape;
    shape.max_rank = j.at("max_rank").get<std::uint32_t>();
    shape.covariate_names = j.at("covariate_names").get<std::vector<std::string>>();
    shape.class_names = j.at("class_names").get<std::vector<std::string>>();
    doc.view = aggregate_from_json(j.at("view"), shape);
    doc.all = aggregate_from_json(j.at("all"), shape);
    for (const json& a : j.at("by_class")) doc.by_class.push_back(aggregate_from_json(a, shape));
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed flow document: {}", e.what()));
  }
  return doc;
}

void write_flow_document(const FlowDocument& doc, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_flow_document(doc));
}

}  // namespace forestflow
