#include "forestflow/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "forestflow/error.hpp"
#include "forestflow/io.hpp"
#include "svg.hpp"

namespace forestflow {

using detail::num;
using detail::xml_escape;

void RenderOptions::validate() const {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument(fmt::format("width and height must be positive, got {}x{}", width, height));
  }
  if (!(min_darkness >= 0.0 && min_darkness < 1.0)) {
    throw InvalidArgument(fmt::format("min_darkness must be in [0, 1), got {}", min_darkness));
  }
}

double segment_darkness(std::uint64_t weight, std::uint64_t max_weight, double min_darkness) {
  if (max_weight == 0) return min_darkness;
  return min_darkness +
         (1.0 - min_darkness) * (static_cast<double>(weight) / static_cast<double>(max_weight));
}

std::string darkness_color(double darkness, ColorMode mode) {
  darkness = std::clamp(darkness, 0.0, 1.0);
  if (mode == ColorMode::kGrayscale) {
    const int v = static_cast<int>(std::lround(255.0 * (1.0 - darkness)));
    return fmt::format("#{0:02x}{0:02x}{0:02x}", v);
  }
  // Viridis anchors from dark (t = 0) to light (t = 1); heavier flows get the
  // darker end.
  static constexpr std::array<std::array<double, 3>, 9> kViridis{{
      {68, 1, 84},
      {71, 44, 122},
      {59, 81, 139},
      {44, 113, 142},
      {33, 144, 141},
      {39, 173, 129},
      {92, 200, 99},
      {170, 220, 50},
      {253, 231, 37},
  }};
  const double t = (1.0 - darkness) * (kViridis.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), kViridis.size() - 2);
  const double f = t - static_cast<double>(i);
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(kViridis[i][c] + f * (kViridis[i + 1][c] - kViridis[i][c])));
  }
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

namespace {

std::string label_name(const GroupLabel& label, const std::vector<std::string>& names) {
  return label.is_terminus() ? std::string("Terminus") : names.at(label.covariate_id());
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string format_group_label(const RenderOptions& opts, const RankedGroup& group,
                               const std::vector<std::string>& covariate_names) {
  std::string s = opts.label_format;
  replace_all(s, "{rank}", std::to_string(group.rank));
  replace_all(s, "{label}", label_name(group.label, covariate_names));
  return s;
}

// ---------------------------------------------------------------------------
// Parallel coordinates

std::string render_pcp_svg(const FlowAggregate& agg, const RenderOptions& opts) {
  opts.validate();
  if (agg.empty()) throw InvalidArgument("cannot render an empty aggregate");
  const std::size_t p = agg.covariate_names.size();

  // Gradations: Terminus first, then covariates.
  std::vector<GroupLabel> gradations{GroupLabel::terminus()};
  std::vector<CovariateId> covs(p);
  std::iota(covs.begin(), covs.end(), CovariateId{0});
  if (opts.axis_order == AxisOrder::kFrequency) {
    std::vector<std::uint64_t> freq(p, 0);
    for (const auto& [g, t] : agg.group_totals) {
      if (!g.label.is_terminus()) freq[g.label.covariate_id()] += t;
    }
    std::stable_sort(covs.begin(), covs.end(),
                     [&](CovariateId a, CovariateId b) { return freq[a] > freq[b]; });
  }
  for (CovariateId c : covs) gradations.push_back(GroupLabel::covariate(c));
  std::vector<std::size_t> slot(p + 1);
  for (std::size_t k = 0; k < gradations.size(); ++k) {
    slot[gradations[k].is_terminus() ? 0 : gradations[k].covariate_id() + 1] = k;
  }

  const double left = 120, right = 40, top = 30, bottom = 50;
  const double plot_w = opts.width - left - right;
  const double plot_h = opts.height - top - bottom;
  auto axis_x = [&](std::uint32_t rank) {
    if (agg.max_rank == 1) return left + plot_w / 2;
    return left + plot_w * (rank - 1) / (agg.max_rank - 1);
  };
  auto grad_y = [&](GroupLabel l) {
    const std::size_t k = slot[l.is_terminus() ? 0 : l.covariate_id() + 1];
    return top + plot_h * static_cast<double>(k) / static_cast<double>(gradations.size() - 1);
  };

  std::string out = detail::svg_open(opts.width, opts.height);
  out += "<g class=\"axes\" stroke=\"#888888\" stroke-width=\"1\">\n";
  for (std::uint32_t r = 1; r <= agg.max_rank; ++r) {
    out += fmt::format("<line class=\"axis\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n",
                       num(axis_x(r)), num(top), num(top + plot_h));
    for (const GroupLabel& g : gradations) {
      out += fmt::format("<line class=\"tick\" x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\"/>\n",
                         num(axis_x(r) - 3), num(axis_x(r) + 3), num(grad_y(g)));
    }
  }
  out += "</g>\n<g class=\"labels\" font-size=\"10\" fill=\"#333333\">\n";
  for (const GroupLabel& g : gradations) {
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                       num(axis_x(1) - 8), num(grad_y(g) + 3),
                       xml_escape(label_name(g, agg.covariate_names)));
  }
  for (std::uint32_t r = 1; r <= agg.max_rank; ++r) {
    out += fmt::format("<text class=\"axis-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" "
                       "font-size=\"12\">Node {}</text>\n",
                       num(axis_x(r)), num(top + plot_h + 25), r);
  }
  out += "</g>\n";

  // Light segments first so heavy flows stay on top.
  auto edges = agg.edge_list();
  std::stable_sort(edges.begin(), edges.end(),
                   [](const FlowEdge& a, const FlowEdge& b) { return a.weight < b.weight; });
  const std::uint64_t max_w = agg.max_edge_weight();
  out += "<g class=\"segments\" stroke-width=\"1.5\" stroke-linecap=\"round\">\n";
  for (const FlowEdge& e : edges) {
    const double d = segment_darkness(e.weight, max_w, opts.min_darkness);
    out += fmt::format(
        "<line class=\"edge\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
        "data-from=\"{}\" data-to=\"{}\" data-weight=\"{}\" data-darkness=\"{:.4f}\"/>\n",
        num(axis_x(e.from.rank)), num(grad_y(e.from.label)), num(axis_x(e.to.rank)),
        num(grad_y(e.to.label)), darkness_color(d, opts.color_mode), group_id(e.from),
        group_id(e.to), e.weight, d);
  }
  out += "</g>\n</svg>\n";
  return out;
}

void render_pcp(const FlowAggregate& agg, const RenderOptions& opts,
                const std::filesystem::path& path) {
  write_file_atomic(path, render_pcp_svg(agg, opts));
}

// ---------------------------------------------------------------------------
// Importance dot chart

std::vector<std::size_t> importance_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

namespace {

void importance_panel(std::string& out, const std::vector<std::string>& names,
                      const std::vector<double>& scores, std::string_view title, double x0,
                      double width, double top, double row_h) {
  const auto order = importance_order(scores);
  double lo = 0.0, hi = 0.0;
  for (double s : scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi == lo) hi = lo + 1.0;
  const double label_w = 90;
  const double px0 = x0 + label_w, px1 = x0 + width - 15;
  auto sx = [&](double v) { return px0 + (px1 - px0) * (v - lo) / (hi - lo); };

  out += fmt::format("<g class=\"panel\" data-metric=\"{}\">\n", xml_escape(title));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                     num((px0 + px1) / 2), num(top - 10), xml_escape(title));
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                     "stroke=\"#888888\"/>\n",
                     num(px0), num(top), num(px1 - px0), num(row_h * order.size()));
  for (std::size_t row = 0; row < order.size(); ++row) {
    const std::size_t j = order[row];
    const double y = top + row_h * (row + 0.5);
    out += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#cccccc\" "
                       "stroke-dasharray=\"1,2\"/>\n",
                       num(px0), num(px1), num(y));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
                       num(px0 - 5), num(y + 3), xml_escape(names.at(j)));
    out += fmt::format("<circle class=\"dot\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"none\" "
                       "stroke=\"#000000\" data-covariate=\"{}\" data-value=\"{:.6g}\"/>\n",
                       num(sx(scores[j])), num(y), xml_escape(names.at(j)), scores[j]);
  }
  const double axis_y = top + row_h * order.size();
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{:.3g}</text>\n",
                     num(px0), num(axis_y + 14), lo);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{:.3g}</text>\n",
                     num(px1), num(axis_y + 14), hi);
  out += "</g>\n";
}

}  // namespace

std::string render_importance_svg(const ImportanceReport& report, const RenderOptions& opts) {
  opts.validate();
  if (report.covariate_names.empty()) throw InvalidArgument("importance report is empty");
  std::vector<std::pair<std::string_view, const std::vector<double>*>> panels;
  const bool want_impurity = opts.metric != ImportanceMetric::kPermutation;
  const bool want_permutation = opts.metric != ImportanceMetric::kImpurity;
  if (want_impurity) panels.emplace_back("Mean decrease in Gini impurity", &report.impurity);
  if (want_permutation) {
    if (report.permutation.empty()) {
      throw InvalidArgument("report has no permutation importance");
    }
    panels.emplace_back("Mean decrease in accuracy", &report.permutation);
  }
  for (const auto& [title, scores] : panels) {
    if (scores->size() != report.covariate_names.size()) {
      throw InvalidArgument("importance scores do not match covariate count");
    }
  }
  const double top = 30, bottom = 30;
  const double row_h = (opts.height - top - bottom) / static_cast<double>(report.covariate_names.size());
  const double panel_w = static_cast<double>(opts.width) / static_cast<double>(panels.size());
  std::string out = detail::svg_open(opts.width, opts.height);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    importance_panel(out, report.covariate_names, *panels[i].second, panels[i].first,
                     panel_w * i, panel_w, top, row_h);
  }
  out += "</svg>\n";
  return out;
}

void render_importance_chart(const ImportanceReport& report, const RenderOptions& opts,
                             const std::filesystem::path& path) {
  write_file_atomic(path, render_importance_svg(report, opts));
}

// ---------------------------------------------------------------------------
// Tree graph

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string tree_graph_dot(const ForestModel& forest, std::size_t tree_index) {
  if (tree_index >= forest.n_trees()) {
    throw InvalidArgument(
        fmt::format("tree index {} out of range (forest has {} trees)", tree_index, forest.n_trees()));
  }
  const Tree& tree = forest.trees[tree_index];
  std::string out = fmt::format("digraph tree_{} {{\n  node [shape=box, fontname=\"Helvetica\"];\n",
                                tree_index);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) {
      out += fmt::format("  n{} [label=\"Terminus\", shape=ellipse, class=\"{}\"];\n", i,
                         dot_escape(forest.class_names.at(n.prediction)));
    } else {
      out += fmt::format("  n{} [label=\"{}\"];\n", i,
                         dot_escape(forest.covariate_names.at(n.split_covariate)));
    }
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) continue;
    out += fmt::format("  n{} -> n{} [label=\"<= {}\"];\n", i, n.left, n.split_threshold);
    out += fmt::format("  n{} -> n{} [label=\"> {}\"];\n", i, n.right, n.split_threshold);
  }
  out += "}\n";
  return out;
}

void export_tree_graph(const ForestModel& forest, std::size_t tree_index,
                       const std::filesystem::path& path) {
  write_file_atomic(path, tree_graph_dot(forest, tree_index));
}

}  // namespace forestflow
