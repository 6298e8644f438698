#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestflow/forest.hpp"
#include "forestflow/path_flow.hpp"

namespace forestflow {

inline constexpr std::string_view kFlowFormatVersion = "1";

// Everything a renderer or the interactive viewer needs: the displayed
// aggregate plus the unfiltered whole-forest and per-class aggregates the
// viewer filters client-side.
struct FlowDocument {
  // class restriction and threshold applied
  FlowAggregate view;
  FlowAggregate all;
  std::vector<FlowAggregate> by_class;  // indexed by ClassId

  bool operator==(const FlowDocument&) const = default;
};

FlowDocument build_flow_document(const ForestModel& forest,
                                 std::uint32_t max_rank,
                                 std::optional<ClassId> class_restriction,
                                 double theta, Execution exec = {});

// Stable, compact JSON (format_version "1").
std::string serialize_flow_document(const FlowDocument& doc);
FlowDocument parse_flow_document(std::string_view text);

void write_flow_document(const FlowDocument& doc,
                         const std::filesystem::path& path);

// "<rank>:<covariate index>" or "<rank>:T".
std::string group_id(const RankedGroup& g);

}  // namespace forestflow
