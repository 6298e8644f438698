#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forestflow/flow_document.hpp"
#include "forestflow/forest.hpp"
#include "forestflow/importance.hpp"
#include "forestflow/path_flow.hpp"

namespace forestflow {

enum class ColorMode { kGrayscale, kViridis };
enum class AxisOrder { kIndex, kFrequency };
enum class ImportanceMetric { kImpurity, kPermutation, kBoth };

struct RenderOptions {
  int width = 960;
  int height = 600;
  ColorMode color_mode = ColorMode::kGrayscale;
  AxisOrder axis_order = AxisOrder::kIndex;
  // Darkness of the lightest segment, in [0, 1).
  double min_darkness = 0.0;
  // {rank} and {label} are substituted.
  std::string label_format = "Node.{rank}_{label}";
  ImportanceMetric metric = ImportanceMetric::kImpurity;

  // Throws InvalidArgument.
  void validate() const;
};

// Linear darkness in [min_darkness, 1], reaching 1 at max_weight.
double segment_darkness(std::uint64_t weight, std::uint64_t max_weight,
                        double min_darkness);

// "#rrggbb" for a darkness value under the given colour mode.
std::string darkness_color(double darkness, ColorMode mode);

std::string format_group_label(const RenderOptions& opts,
                               const RankedGroup& group,
                               const std::vector<std::string>& covariate_names);

// Parallel-coordinates plot: one axis per rank, Terminus as the first
// gradation, one segment per edge.
std::string render_pcp_svg(const FlowAggregate& agg, const RenderOptions& opts);
void render_pcp(const FlowAggregate& agg, const RenderOptions& opts,
                const std::filesystem::path& path);

struct SankeyBlock {
  RankedGroup group;
  std::string label;
  double x = 0, y = 0, width = 0, height = 0;
};

struct SankeyLink {
  RankedGroup from;
  RankedGroup to;
  std::uint64_t weight = 0;
  double width = 0;
  double y0 = 0;  // centre of the ribbon at the source block
  double y1 = 0;  // centre at the target block
  double x0 = 0, x1 = 0;
};

struct SankeyLayout {
  std::vector<SankeyBlock> blocks;  // column by column, top to bottom
  std::vector<SankeyLink> links;
  double scale = 0;                 // pixels per path
};

// Columns by rank; blocks by descending total with Terminus last; heights and
// link widths are total * scale with one scale for the whole diagram.
SankeyLayout layout_sankey(const FlowAggregate& agg, const RenderOptions& opts);

// Self-contained HTML: static SVG, the FlowDocument as a JSON data island
// (<script id="flow-data">) and the viewer bundle, all inline.
std::string render_sankey_html(const FlowDocument& doc,
                               const RenderOptions& opts,
                               std::optional<std::string_view> bundle =
                                   std::nullopt);
void render_sankey_doc(const FlowDocument& doc, const RenderOptions& opts,
                       const std::filesystem::path& path);

// Extracts the data island text from a rendered document.
std::string extract_data_island(std::string_view html);

// The viewer bundle compiled into the library; empty when the build had none.
std::string_view viewer_bundle();

// Dot chart sorted by descending score; equal scores keep covariate order.
std::string render_importance_svg(const ImportanceReport& report,
                                  const RenderOptions& opts);
void render_importance_chart(const ImportanceReport& report,
                             const RenderOptions& opts,
                             const std::filesystem::path& path);

// Row order of the chart for one metric.
std::vector<std::size_t> importance_order(const std::vector<double>& scores);

// Graphviz DOT digraph of one tree: internal nodes carry their covariate name,
// leaves are labelled Terminus.
std::string tree_graph_dot(const ForestModel& forest, std::size_t tree_index);
void export_tree_graph(const ForestModel& forest, std::size_t tree_index,
                       const std::filesystem::path& path);

}  // namespace forestflow
