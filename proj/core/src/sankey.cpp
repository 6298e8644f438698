#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "forestflow/error.hpp"
#include "forestflow/io.hpp"
#include "forestflow/render.hpp"
#include "svg.hpp"

namespace forestflow {

using detail::num;
using detail::xml_escape;

namespace {

constexpr double kBlockWidth = 14.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 20.0;
constexpr double kMarginLeft = 20.0;
constexpr double kMarginRight = 150.0;  // room for the last column's labels
constexpr double kMaxPadding = 10.0;

constexpr std::string_view kIslandOpen = "<script type=\"application/json\" id=\"flow-data\">";
constexpr std::string_view kIslandClose = "</script>";

std::string group_name(const RankedGroup& g, const std::vector<std::string>& names) {
  return g.label.is_terminus() ? std::string("Terminus") : names.at(g.label.covariate_id());
}

}  // namespace

SankeyLayout layout_sankey(const FlowAggregate& agg, const RenderOptions& opts) {
  opts.validate();
  if (agg.empty()) throw InvalidArgument("cannot render an empty aggregate");

  // Column contents: descending total, ties by covariate index, Terminus last.
  std::map<std::uint32_t, std::vector<std::pair<RankedGroup, std::uint64_t>>> columns;
  for (const auto& [g, t] : agg.group_totals) columns[g.rank].emplace_back(g, t);
  std::size_t most_blocks = 1;
  for (auto& [rank, col] : columns) {
    std::stable_sort(col.begin(), col.end(), [](const auto& a, const auto& b) {
      if (a.first.label.is_terminus() != b.first.label.is_terminus()) {
        return b.first.label.is_terminus();
      }
      return a.second > b.second;
    });
    most_blocks = std::max(most_blocks, col.size());
  }

  const double plot_h = opts.height - kMarginTop - kMarginBottom;
  const double plot_w = opts.width - kMarginLeft - kMarginRight - kBlockWidth;
  const double padding =
      most_blocks > 1 ? std::min(kMaxPadding, 0.3 * plot_h / static_cast<double>(most_blocks - 1))
                      : 0.0;

  SankeyLayout layout;
  layout.scale = -1;
  for (const auto& [rank, col] : columns) {
    std::uint64_t total = 0;
    for (const auto& [g, t] : col) total += t;
    const double s = (plot_h - padding * static_cast<double>(col.size() - 1)) /
                     static_cast<double>(total);
    if (layout.scale < 0 || s < layout.scale) layout.scale = s;
  }

  std::map<RankedGroup, std::size_t> index;
  for (const auto& [rank, col] : columns) {
    const double x = agg.max_rank == 1
                         ? kMarginLeft
                         : kMarginLeft + plot_w * (rank - 1) / static_cast<double>(agg.max_rank - 1);
    double y = kMarginTop;
    for (const auto& [g, t] : col) {
      SankeyBlock b;
      b.group = g;
      b.label = format_group_label(opts, g, agg.covariate_names);
      b.x = x;
      b.y = y;
      b.width = kBlockWidth;
      b.height = static_cast<double>(t) * layout.scale;
      index[g] = layout.blocks.size();
      layout.blocks.push_back(std::move(b));
      y += layout.blocks.back().height + padding;
    }
  }

  // Ribbons stack inside each block in the order of the block at the other end.
  auto edges = agg.edge_list();
  std::vector<double> out_offset(layout.blocks.size(), 0.0), in_offset(layout.blocks.size(), 0.0);
  auto by_target = edges;
  std::stable_sort(by_target.begin(), by_target.end(), [&](const FlowEdge& a, const FlowEdge& b) {
    return index.at(a.to) < index.at(b.to);
  });
  std::map<std::pair<RankedGroup, RankedGroup>, SankeyLink> links;
  for (const FlowEdge& e : by_target) {
    const SankeyBlock& src = layout.blocks[index.at(e.from)];
    SankeyLink l;
    l.from = e.from;
    l.to = e.to;
    l.weight = e.weight;
    l.width = static_cast<double>(e.weight) * layout.scale;
    l.x0 = src.x + src.width;
    l.y0 = src.y + out_offset[index.at(e.from)] + l.width / 2;
    out_offset[index.at(e.from)] += l.width;
    links[{e.from, e.to}] = l;
  }
  auto by_source = edges;
  std::stable_sort(by_source.begin(), by_source.end(), [&](const FlowEdge& a, const FlowEdge& b) {
    return index.at(a.from) < index.at(b.from);
  });
  for (const FlowEdge& e : by_source) {
    const SankeyBlock& dst = layout.blocks[index.at(e.to)];
    SankeyLink& l = links[{e.from, e.to}];
    l.x1 = dst.x;
    l.y1 = dst.y + in_offset[index.at(e.to)] + l.width / 2;
    in_offset[index.at(e.to)] += l.width;
  }
  for (const FlowEdge& e : edges) layout.links.push_back(links[{e.from, e.to}]);
  return layout;
}


std::string render_sankey_html(const FlowDocument& doc, const RenderOptions& opts,
                               std::optional<std::string_view> bundle) {
  const std::string_view js = bundle ? *bundle : viewer_bundle();
  if (js.empty()) throw Error("viewer bundle missing from build");
  if (js.find("</script") != std::string_view::npos) {
    throw Error("viewer bundle contains a closing script tag");
  }
  const FlowAggregate& agg = doc.view;
  const SankeyLayout layout = layout_sankey(agg, opts);
  const auto& names = agg.covariate_names;
  const double total = static_cast<double>(agg.total_paths);
  auto frac = [&](std::uint64_t w) { return total > 0 ? static_cast<double>(w) / total : 0.0; };

  std::string title = fmt::format("Paths through {} trees", doc.all.n_trees);
  if (agg.class_restriction) {
    title += fmt::format(" predicting '{}'", agg.class_names.at(*agg.class_restriction));
  }

  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += fmt::format("<title>{}</title>\n", xml_escape(title));
  out += "<style>\n"
         "body{font-family:Helvetica,Arial,sans-serif;margin:12px;color:#222}\n"
         "#flow-header{font-size:14px;margin-bottom:6px}\n"
         ".link{fill:none;stroke:#7a7a7a;stroke-opacity:.35}\n"
         ".link.hl{stroke:#d95f02;stroke-opacity:.75}\n"
         ".block{fill:#4c6a92;stroke:#1f2f45;stroke-width:.5}\n"
         ".block.terminus{fill:#9a9a9a}\n"
         ".block-label{font-size:10px;fill:#222}\n"
         "#flow-tooltip{position:absolute;display:none;background:#fff;border:1px solid #888;"
         "padding:3px 6px;font-size:12px;pointer-events:none}\n"
         "</style>\n</head>\n<body>\n";
  out += fmt::format(
      "<div id=\"flow-header\">{}: <span id=\"flow-total\">{}</span> paths, first {} nodes</div>\n",
      xml_escape(title), agg.total_paths, agg.max_rank);
  if (agg.threshold > 0) {
    std::string residual;
    for (std::size_t r = 0; r < agg.residual.size(); ++r) {
      residual += fmt::format("{}Node {}: {}", r ? ", " : "", r + 1, detail::percent(agg.residual[r]));
    }
    out += fmt::format("<div id=\"flow-residual\">Threshold {}; removed per rank: {}</div>\n",
                       agg.threshold, residual);
  }
  out += fmt::format(
      "<svg id=\"flow-sankey\" xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      opts.width, opts.height);
  out += "<g class=\"links\">\n";
  for (const SankeyLink& l : layout.links) {
    const double xm = (l.x0 + l.x1) / 2;
    out += fmt::format(
        "<path class=\"link\" data-from=\"{}\" data-to=\"{}\" data-weight=\"{}\" "
        "d=\"M{},{} C{},{} {},{} {},{}\" stroke-width=\"{}\"><title>{} (Node {}) &#8594; {} "
        "(Node {}): {} paths ({})</title></path>\n",
        group_id(l.from), group_id(l.to), l.weight, num(l.x0), num(l.y0), num(xm), num(l.y0),
        num(xm), num(l.y1), num(l.x1), num(l.y1), num(std::max(l.width, 0.5)),
        xml_escape(group_name(l.from, names)), l.from.rank, xml_escape(group_name(l.to, names)),
        l.to.rank, l.weight, detail::percent(frac(l.weight)));
  }
  out += "</g>\n<g class=\"blocks\">\n";
  for (const SankeyBlock& b : layout.blocks) {
    const std::uint64_t t = agg.group_totals.at(b.group);
    out += fmt::format(
        "<rect class=\"block{}\" data-id=\"{}\" data-total=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" "
        "height=\"{}\"><title>{}: {} paths ({})</title></rect>\n",
        b.group.label.is_terminus() ? " terminus" : "", group_id(b.group), t, num(b.x), num(b.y),
        num(b.width), num(b.height), xml_escape(b.label), t, detail::percent(frac(t)));
    out += fmt::format("<text class=\"block-label\" x=\"{}\" y=\"{}\">{}</text>\n",
                       num(b.x + b.width + 3), num(b.y + b.height / 2 + 3), xml_escape(b.label));
  }
  out += "</g>\n</svg>\n<div id=\"flow-tooltip\"></div>\n";

  std::string island = serialize_flow_document(doc);
  while (!island.empty() && island.back() == '\n') island.pop_back();
  for (std::size_t pos = island.find("</"); pos != std::string::npos; pos = island.find("</", pos)) {
    island.replace(pos, 2, "<\\/");
  }
  out += kIslandOpen;
  out += island;
  out += kIslandClose;
  out += "\n<script id=\"forestflow-viewer\">\n";
  out += js;
  if (!js.empty() && js.back() != '\n') out += '\n';
  out += "</script>\n</body>\n</html>\n";
  return out;
}

void render_sankey_doc(const FlowDocument& doc, const RenderOptions& opts,
                       const std::filesystem::path& path) {
  write_file_atomic(path, render_sankey_html(doc, opts));
}

std::string extract_data_island(std::string_view html) {
  const auto begin = html.find(kIslandOpen);
  if (begin == std::string_view::npos) throw ParseError("document has no flow-data island");
  const auto start = begin + kIslandOpen.size();
  const auto end = html.find(kIslandClose, start);
  if (end == std::string_view::npos) throw ParseError("unterminated flow-data island");
  std::string island(html.substr(start, end - start));
  for (std::size_t pos = island.find("<\\/"); pos != std::string::npos; pos = island.find("<\\/", pos)) {
    island.replace(pos, 3, "</");
  }
  return island;
}

}  // namespace forestflow
