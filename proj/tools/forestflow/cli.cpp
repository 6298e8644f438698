#include "forestflow/cli.hpp"

#include <filesystem>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "forestflow/error.hpp"
#include "forestflow/flow_document.hpp"
#include "forestflow/forest.hpp"
#include "forestflow/forest_io.hpp"
#include "forestflow/importance.hpp"
#include "forestflow/io.hpp"
#include "forestflow/path_flow.hpp"
#include "forestflow/render.hpp"
#include "forestflow/tuning.hpp"

namespace forestflow::cli {

namespace {

namespace fs = std::filesystem;

class Summary {
 public:
  explicit Summary(std::ostream& out) : out_(out) {}
  template <typename T>
  void add(std::string_view key, const T& value) {
    out_ << fmt::format("forestflow: {}={}\n", key, value);
  }

 private:
  std::ostream& out_;
};

// Where the forest comes from: a forest document or foreign node tables whose
// covariate and class names are taken from a dataset header.
struct ForestSource {
  std::string forest;
  std::vector<std::string> node_tables;
  std::string data;
  std::string response;
  bool strict = false;

  void add_options(CLI::App* app, bool data_is_shared = false) {
    app->add_option("--forest", forest, "Forest document written by `train`");
    app->add_option("--node-table", node_tables,
                    "Node table(s) exported by the reference random forest software");
    app->add_flag("--strict", strict, "Reject node tables whose internal rows carry predictions");
    if (!data_is_shared) {
      app->add_option("--data", data, "Dataset supplying names for --node-table");
      app->add_option("--response", response, "Response column of --data");
    }
  }

  void check() const {
    if (forest.empty() == node_tables.empty()) {
      throw InvalidArgument("exactly one of --forest or --node-table is required");
    }
    if (!node_tables.empty() && (data.empty() || response.empty())) {
      throw InvalidArgument("--node-table needs --data and --response for names");
    }
  }

  ForestModel load() const {
    if (!forest.empty()) return read_forest(forest);
    const Dataset d = read_dataset(data, response);
    std::vector<fs::path> paths(node_tables.begin(), node_tables.end());
    return read_node_tables(paths, d.covariate_names, d.class_names, {strict});
  }
};

struct FlowSettings {
  std::uint32_t max_rank = kDefaultMaxRank;
  std::string class_name;
  double threshold = 0.0;

  void add_options(CLI::App* app) {
    app->add_option("--max-rank", max_rank, "Nodes per path to aggregate")
        ->check(CLI::Range(1u, 1000u));
    app->add_option("--class", class_name, "Only paths to leaves predicting this class");
    app->add_option("--threshold", threshold, "Hide groups below this share of their rank")
        ->check(CLI::Range(0.0, 1.0));
  }

  FlowDocument build(const ForestModel& forest, Execution exec) const {
    std::optional<ClassId> cls;
    if (!class_name.empty()) cls = require_class(forest, class_name);
    return build_flow_document(forest, max_rank, cls, threshold, exec);
  }
};

struct RenderSettings {
  RenderOptions opts;
  std::string color_mode = "grayscale";
  std::string axis_order = "index";

  void add_options(CLI::App* app, bool pcp) {
    app->add_option("--width", opts.width)->check(CLI::PositiveNumber);
    app->add_option("--height", opts.height)->check(CLI::PositiveNumber);
    if (pcp) {
      app->add_option("--color-mode", color_mode)
          ->check(CLI::IsMember({"grayscale", "viridis"}));
      app->add_option("--axis-order", axis_order)->check(CLI::IsMember({"index", "frequency"}));
      app->add_option("--min-darkness", opts.min_darkness)
          ->check(CLI::Range(0.0, 0.999999));
    } else {
      app->add_option("--label-format", opts.label_format,
                      "Block label template with {rank} and {label}");
    }
  }

  RenderOptions resolve() const {
    RenderOptions o = opts;
    o.color_mode = color_mode == "viridis" ? ColorMode::kViridis : ColorMode::kGrayscale;
    o.axis_order = axis_order == "frequency" ? AxisOrder::kFrequency : AxisOrder::kIndex;
    o.validate();
    return o;
  }
};

std::vector<std::string> reversed_tail(const std::vector<std::string>& args) {
  if (args.empty()) return {};
  return {args.rbegin(), args.rend() - 1};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"forestflow: random forest path-flow visualisation"};
  app.name("forestflow");
  app.require_subcommand(1);
  Summary summary(out);
  const Execution exec = Execution::from_environment();

  // train
  std::string data_path, response, out_path;
  RFConfig config;
  std::optional<std::uint32_t> mtry, max_nodes, bootstrap_size;
  auto* train = app.add_subcommand("train", "Train a random forest and report OOB accuracy");
  train->add_option("--data", data_path, "Comma-separated dataset with header")->required();
  train->add_option("--response", response, "Response column")->required();
  train->add_option("--n-trees", config.n_trees)->check(CLI::Range(1u, 1000000u));
  train->add_option("--mtry", mtry, "Covariates sampled per split (default floor(sqrt(p)))")
      ->check(CLI::PositiveNumber);
  train->add_option("--min-node-size", config.min_node_size)->check(CLI::PositiveNumber);
  train->add_option("--max-nodes", max_nodes)->check(CLI::PositiveNumber);
  train->add_option("--bootstrap-size", bootstrap_size)->check(CLI::PositiveNumber);
  train->add_option("--seed", config.seed);
  train->add_option("--out", out_path, "Forest document to write")->required();

  // tune
  std::vector<std::uint32_t> candidates;
  std::uint32_t folds = 10;
  auto* tune = app.add_subcommand("tune", "Select mtry by stratified k-fold cross-validation");
  tune->add_option("--data", data_path)->required();
  tune->add_option("--response", response)->required();
  tune->add_option("--candidates", candidates, "mtry values to compare")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  tune->add_option("--folds", folds)->check(CLI::Range(2u, 1000000u));
  tune->add_option("--n-trees", config.n_trees)->check(CLI::Range(1u, 1000000u));
  tune->add_option("--min-node-size", config.min_node_size)->check(CLI::PositiveNumber);
  tune->add_option("--seed", config.seed);
  tune->add_option("--out", out_path, "Optional CSV score table");

  // flows
  ForestSource source;
  FlowSettings flow;
  auto* flows = app.add_subcommand("flows", "Aggregate paths into a flow document");
  source.add_options(flows);
  flow.add_options(flows);
  flows->add_option("--out", out_path, "Flow document (JSON) to write")->required();

  // render-pcp / render-sankey
  std::string flows_path;
  RenderSettings render;
  auto* pcp = app.add_subcommand("render-pcp", "Parallel-coordinates plot of path flows (SVG)");
  auto* sankey = app.add_subcommand("render-sankey", "Self-contained interactive Sankey (HTML)");
  for (auto* sub : {pcp, sankey}) {
    source.add_options(sub);
    flow.add_options(sub);
    sub->add_option("--flows", flows_path, "Flow document written by `flows`");
    render.add_options(sub, sub == pcp);
    sub->add_option("--out", out_path)->required();
  }

  // importance
  std::uint32_t repeats = 1;
  std::uint64_t importance_seed = 1;
  std::string metric = "both";
  std::string report_path;
  auto* importance = app.add_subcommand("importance", "Covariate importance dot chart (SVG)");
  importance->add_option("--forest", source.forest)->required();
  importance->add_option("--data", data_path, "Training data (needed for permutation)");
  importance->add_option("--response", response);
  importance->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  importance->add_option("--seed", importance_seed);
  importance->add_option("--metric", metric)
      ->check(CLI::IsMember({"impurity", "permutation", "both"}));
  importance->add_option("--width", render.opts.width)->check(CLI::PositiveNumber);
  importance->add_option("--height", render.opts.height)->check(CLI::PositiveNumber);
  importance->add_option("--report", report_path, "Optional CSV of both scores");
  importance->add_option("--out", out_path)->required();

  // export-tree
  std::size_t tree_index = 0;
  auto* export_tree = app.add_subcommand("export-tree", "Single tree as a Graphviz digraph");
  source.add_options(export_tree);
  export_tree->add_option("--tree", tree_index, "0-based tree index");
  export_tree->add_option("--out", out_path)->required();

  try {
    auto rev = reversed_tail(args);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "forestflow: " << e.what() << "\n";
    return kUsage;
  }
  if (app.get_subcommands().empty()) return kUsage;
  CLI::App* cmd = app.get_subcommands().front();

  try {
    summary.add("command", cmd->get_name());
    if (cmd == train) {
      const Dataset data = read_dataset(data_path, response);
      config.mtry = mtry.value_or(default_mtry(data.n_covariates()));
      config.max_nodes = max_nodes;
      config.bootstrap_size = bootstrap_size;
      config.validate_for(data);
      const ForestModel forest = train_forest(data, config, exec);
      const double oob = oob_accuracy(forest, data, exec);
      write_forest(forest, out_path);
      summary.add("seed", config.seed);
      summary.add("n_trees", config.n_trees);
      summary.add("mtry", config.mtry);
      summary.add("observations", data.n_rows());
      summary.add("oob_accuracy", fmt::format("{:.6f}", oob));
      summary.add("output", out_path);
    } else if (cmd == tune) {
      const Dataset data = read_dataset(data_path, response);
      config.mtry = 1;
      const TuneResult result = tune_mtry(data, candidates, folds, config, exec);
      std::string table = "mtry,mean_accuracy\n";
      for (const auto& s : result.scores) {
        summary.add(fmt::format("cv_accuracy[mtry={}]", s.mtry),
                    fmt::format("{:.6f}", s.mean_accuracy));
        table += fmt::format("{},{:.17g}\n", s.mtry, s.mean_accuracy);
      }
      summary.add("seed", config.seed);
      summary.add("folds", folds);
      summary.add("selected_mtry", result.selected_mtry);
      if (!out_path.empty()) {
        write_file_atomic(out_path, table);
        summary.add("output", out_path);
      }
    } else if (cmd == flows) {
      source.check();
      const ForestModel forest = source.load();
      const FlowDocument doc = flow.build(forest, exec);
      write_flow_document(doc, out_path);
      summary.add("n_trees", forest.n_trees());
      summary.add("max_rank", flow.max_rank);
      summary.add("paths", doc.view.total_paths);
      summary.add("output", out_path);
    } else if (cmd == pcp || cmd == sankey) {
      const RenderOptions opts = render.resolve();
      FlowDocument doc;
      if (!flows_path.empty()) {
        if (!source.forest.empty() || !source.node_tables.empty()) {
          throw InvalidArgument("--flows cannot be combined with --forest or --node-table");
        }
        doc = parse_flow_document(read_file(flows_path));
      } else {
        source.check();
        doc = flow.build(source.load(), exec);
      }
      if (cmd == pcp) {
        render_pcp(doc.view, opts, out_path);
      } else {
        render_sankey_doc(doc, opts, out_path);
      }
      summary.add("paths", doc.view.total_paths);
      summary.add("output", out_path);
    } else if (cmd == importance) {
      const bool want_permutation = metric != "impurity";
      if (want_permutation && (data_path.empty() || response.empty())) {
        throw InvalidArgument("permutation importance needs --data and --response");
      }
      const ForestModel forest = read_forest(source.forest);
      ImportanceReport report;
      report.covariate_names = forest.covariate_names;
      report.impurity = impurity_importance(forest);
      if (want_permutation) {
        const Dataset data = read_dataset(data_path, response);
        report.permutation = permutation_importance(forest, data, repeats, importance_seed, exec);
      }
      RenderOptions opts = render.opts;
      opts.metric = metric == "impurity"      ? ImportanceMetric::kImpurity
                    : metric == "permutation" ? ImportanceMetric::kPermutation
                                              : ImportanceMetric::kBoth;
      render_importance_chart(report, opts, out_path);
      if (!report_path.empty()) {
        std::string csv = "covariate,impurity,permutation\n";
        for (std::size_t j = 0; j < report.covariate_names.size(); ++j) {
          csv += fmt::format("{},{:.17g},{}\n", report.covariate_names[j], report.impurity[j],
                             report.permutation.empty()
                                 ? std::string()
                                 : fmt::format("{:.17g}", report.permutation[j]));
        }
        write_file_atomic(report_path, csv);
        summary.add("report", report_path);
      }
      if (want_permutation) summary.add("seed", importance_seed);
      summary.add("output", out_path);
    } else if (cmd == export_tree) {
      source.check();
      const ForestModel forest = source.load();
      export_tree_graph(forest, tree_index, out_path);
      summary.add("tree", tree_index);
      summary.add("nodes", forest.trees.at(tree_index).nodes.size());
      summary.add("output", out_path);
    }
  } catch (const InvalidArgument& e) {
    err << "forestflow: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "forestflow: error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace forestflow::cli
