#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cliquewatch/baselines.hpp"
#include "cliquewatch/error.hpp"
#include "cliquewatch/evaluation.hpp"
#include "cliquewatch/regression.hpp"
#include "cliquewatch/scoring.hpp"
#include "cliquewatch/simulator.hpp"
#include "cliquewatch/stream.hpp"
#include "cliquewatch/text.hpp"

#ifndef CLIQUEWATCH_VERSION
#define CLIQUEWATCH_VERSION "unknown"
#endif

namespace cliquewatch::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr double kDefaultWindowLength = 86400.0;  // one day, in seconds

// Everything a command needs to be re-run: written next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  Json config = Json::object();
  Json seeds = Json::object();
  Json inputs = Json::object();
  Json outputs = Json::object();
  Json result = Json::object();

  void write(const std::string& path) const {
    Json j;
    j["tool"] = "cliquewatch";
    j["version"] = CLIQUEWATCH_VERSION;
    j["command"] = command;
    j["argv"] = argv;
    j["config"] = config;
    j["seeds"] = seeds;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (!result.empty()) j["result"] = result;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest '" + path + "'");
    out << j.dump(2) << '\n';
  }
};

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

// Flag value if given, else the stream header's, else one day.
double resolve_window_length(double flag, const ParsedStream& parsed) {
  if (flag > 0.0) return flag;
  if (parsed.window_length > 0.0) return parsed.window_length;
  return kDefaultWindowLength;
}

EventStream restrict_time(const EventStream& stream, double begin, double end) {
  if (begin <= 0.0 && !std::isfinite(end)) return stream;
  return stream.slice(begin, end);
}

std::vector<NodeIndex> parse_node_list(const std::string& text, std::size_t node_count) {
  std::vector<NodeIndex> nodes;
  if (text == "all") {
    for (NodeIndex j = 0; j < node_count; ++j) nodes.push_back(j);
    return nodes;
  }
  for (const auto& field : split_csv_line(text)) {
    long long v = 0;
    try {
      v = parse_int(field);
    } catch (const ValidationError&) {
      throw ConfigError("--nodes expects 'all' or a comma separated list, got '" + text + "'");
    }
    if (v < 0 || static_cast<unsigned long long>(v) >= node_count) {
      throw ConfigError("--nodes entry " + field + " outside [0, " + std::to_string(node_count) +
                        ")");
    }
    nodes.push_back(static_cast<NodeIndex>(v));
  }
  if (nodes.empty()) throw ConfigError("--nodes is empty");
  return nodes;
}

Json to_json(const RegressorConfig& c) {
  Json j;
  j["method"] = to_string(c.method);
  j["forest_size"] = c.forest_size;
  j["max_depth"] = c.max_depth;
  j["min_leaf"] = c.min_leaf;
  j["bandwidth"] = c.bandwidth;
  j["kernel_radius"] = c.kernel_radius;
  return j;
}

// ---- option structs, filled by CLI11 ----

struct RegressorFlags {
  std::string method = "forest";
  RegressorConfig config;

  void add(CLI::App* app) {
    app->add_option("--method", method, "Regressor: forest | tree | kernel")
        ->check(CLI::IsMember({"forest", "tree", "kernel"}))
        ->capture_default_str();
    app->add_option("--seed", config.seed, "Seed for bootstrap and feature sampling")
        ->capture_default_str();
    app->add_option("--trees", config.forest_size, "Forest size")->capture_default_str();
    app->add_option("--max-depth", config.max_depth, "Tree depth limit, 0 = unlimited")
        ->capture_default_str();
    app->add_option("--min-leaf", config.min_leaf, "Minimum events per leaf")
        ->capture_default_str();
    app->add_option("--bandwidth", config.bandwidth, "Kernel bandwidth h")->capture_default_str();
    app->add_option("--kernel-radius", config.kernel_radius,
                    "Hamming radius beyond which kernel weights vanish, -1 = none")
        ->capture_default_str();
    app->add_option("--threads", config.threads, "Worker threads, 0 = all cores")
        ->capture_default_str();
  }

  RegressorConfig resolve() {
    config.method = parse_regression_method(method);
    validate(config);
    return config;
  }
};

struct SimulateFlags {
  std::string preset;
  std::string config_path;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> layout_seed;
  std::string out;
  bool no_oracle = false;
};

struct TrainFlags {
  std::string stream;
  std::string out;
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
  RegressorFlags regressor;
};

struct CalibrateFlags {
  std::string stream;
  std::string out = "calibration.csv";
  double target_fpr = 0.05;
  std::size_t folds = 5;
  std::string mode = "plugin";
  std::string side = "bilateral";
  double window_length = 0.0;
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
  RegressorFlags regressor;
};

struct DetectFlags {
  std::string model;
  std::string stream;
  double delta = 0.01;
  std::string mode = "plugin";
  std::string side = "bilateral";
  bool squared = false;
  std::string nodes = "all";
  std::string out;
  std::string bands;
  double window_length = 0.0;
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
  std::size_t threads = 0;
};

struct BaselineFlags {
  std::string method;
  std::string stream;
  std::string train;
  std::size_t window = kDefaultScanLookback;
  std::string side = "bilateral";
  double alpha = 0.05;
  double z_threshold = 3.0;
  std::string out;
  double window_length = 0.0;
};

struct EvaluateFlags {
  std::vector<std::string> scores;
  std::string labels;
  std::string out;
};

// ---- commands ----

int cmd_simulate(const SimulateFlags& f, RunManifest& manifest) {
  if (f.preset.empty() == f.config_path.empty()) {
    throw ConfigError("simulate needs exactly one of --preset or --config");
  }
  SimulationConfig config =
      f.preset.empty() ? read_simulation_config_file(f.config_path) : preset(parse_preset(f.preset));
  config.seed = f.seed;
  if (f.layout_seed) config.layout_seed = *f.layout_seed;
  config.validate();

  const LabeledStream labeled = generate(config);
  const fs::path dir(f.out);
  fs::create_directories(dir);

  const auto path = [&](const char* name) { return (dir / name).string(); };
  {
    auto out = open_output(path("stream.jsonl"));
    write_stream(out, labeled.stream(), 1.0);
  }
  {
    auto out = open_output(path("labels.csv"));
    write_labels_csv(out, labeled);
  }
  {
    auto out = open_output(path("locations.csv"));
    write_locations_csv(out, labeled);
  }
  {
    auto out = open_output(path("config.txt"));
    write_simulation_config(out, config);
  }
  manifest.outputs["stream"] = path("stream.jsonl");
  manifest.outputs["labels"] = path("labels.csv");
  manifest.outputs["locations"] = path("locations.csv");
  manifest.outputs["config"] = path("config.txt");
  if (!f.no_oracle) {
    auto out = open_output(path("oracle.jsonl"));
    write_oracle_jsonl(out, labeled);
    manifest.outputs["oracle"] = path("oracle.jsonl");
  }

  std::ostringstream resolved;
  write_simulation_config(resolved, config);
  manifest.config["preset"] = f.preset;
  manifest.config["simulation"] = resolved.str();
  manifest.seeds["seed"] = config.seed;
  manifest.seeds["layout_seed"] = config.layout_seed;
  if (!f.config_path.empty()) manifest.inputs["config"] = f.config_path;
  manifest.result["windows"] = config.timestamps;
  manifest.result["events"] = labeled.stream().size();
  manifest.write(path("manifest.json"));

  std::cout << "wrote " << labeled.stream().size() << " events over " << config.timestamps
            << " windows to " << dir.string() << '\n';
  return 0;
}

int cmd_train(TrainFlags& f, RunManifest& manifest) {
  const RegressorConfig config = f.regressor.resolve();
  const ParsedStream parsed = read_stream_file(f.stream);
  const EventStream train = restrict_time(parsed.stream, f.begin, f.end);
  if (train.empty()) throw ValidationError("no training events in [begin, end)");

  const ModelSet models = fit_all(train, config);
  {
    auto out = open_output(f.out);
    save_models(out, models);
  }

  manifest.config["regressor"] = to_json(config);
  manifest.config["begin"] = f.begin;
  if (std::isfinite(f.end)) manifest.config["end"] = f.end;
  manifest.seeds["seed"] = config.seed;
  manifest.inputs["stream"] = f.stream;
  manifest.outputs["model"] = f.out;
  manifest.result["events"] = train.size();
  manifest.result["nodes"] = train.node_count();
  manifest.write(f.out + ".manifest.json");

  std::cout << "fitted " << models.node_count() << " " << to_string(config.method)
            << " models on " << train.size() << " events\n";
  return 0;
}

int cmd_calibrate(CalibrateFlags& f, RunManifest& manifest) {
  const RegressorConfig config = f.regressor.resolve();
  const ParsedStream parsed = read_stream_file(f.stream);
  const EventStream train = restrict_time(parsed.stream, f.begin, f.end);
  if (train.empty()) throw ValidationError("no calibration events in [begin, end)");

  CalibrationOptions options;
  options.target_fpr = f.target_fpr;
  options.folds = f.folds;
  options.mode = parse_bound_mode(f.mode);
  options.side = parse_side(f.side);
  options.window_length = resolve_window_length(f.window_length, parsed);
  const CalibrationResult result = calibrate_delta(train, config, options);

  {
    auto out = open_output(f.out);
    out << "delta,fpr\n";
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
      out << format_double(result.grid[g]) << ',' << format_double(result.fpr[g]) << '\n';
    }
  }

  manifest.config["regressor"] = to_json(config);
  manifest.config["target_fpr"] = options.target_fpr;
  manifest.config["folds"] = options.folds;
  manifest.config["mode"] = to_string(options.mode);
  manifest.config["side"] = to_string(options.side);
  manifest.config["window_length"] = options.window_length;
  manifest.config["begin"] = f.begin;
  if (std::isfinite(f.end)) manifest.config["end"] = f.end;
  manifest.seeds["seed"] = config.seed;
  manifest.inputs["stream"] = f.stream;
  manifest.outputs["table"] = f.out;
  manifest.result["delta"] = result.delta;
  manifest.result["achieved"] = result.achieved;
  manifest.result["instances"] = result.instances;
  manifest.write(f.out + ".manifest.json");

  if (!result.achieved) {
    std::cerr << "warning: no grid value reaches FPR " << format_double(options.target_fpr)
              << "; using the smallest delta\n";
  }
  std::cout << format_double(result.delta) << '\n';
  return 0;
}

int cmd_detect(const DetectFlags& f, RunManifest& manifest) {
  DetectOptions options;
  options.delta = f.delta;
  options.mode = parse_bound_mode(f.mode);
  options.side = parse_side(f.side);
  options.unilateral_form = f.squared ? UnilateralForm::squared : UnilateralForm::as_printed;
  validate_delta(options.delta);

  const ModelSet models = load_models_file(f.model);
  const ParsedStream parsed = read_stream_file(f.stream);
  if (parsed.stream.node_count() != models.node_count()) {
    throw ValidationError("model covers " + std::to_string(models.node_count()) +
                          " nodes but the stream has " +
                          std::to_string(parsed.stream.node_count()));
  }
  const double window_length = resolve_window_length(f.window_length, parsed);
  const EventStream test = restrict_time(parsed.stream, f.begin, f.end);
  if (test.empty()) throw ValidationError("no events to score in [begin, end)");
  const WindowedStream windows(test, window_length);
  const auto nodes = parse_node_list(f.nodes, models.node_count());

  const auto detections = detect_all(models, windows, nodes, options, f.threads);
  {
    auto out = open_output(f.out);
    write_detections_csv(out, detections, options);
  }

  const std::string bands = f.bands.empty() ? f.out + ".bands" : f.bands;
  fs::create_directories(bands);
  const std::size_t T = windows.window_count();
  Json band_files = Json::array();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = (fs::path(bands) / ("node_" + std::to_string(nodes[i]) + ".csv")).string();
    auto out = open_output(path);
    write_band_csv(out, std::span(detections).subspan(i * T, T));
    band_files.push_back(path);
  }

  std::size_t flagged = 0;
  for (const auto& d : detections) flagged += d.verdict.is_anomaly ? 1 : 0;

  manifest.config["delta"] = options.delta;
  manifest.config["mode"] = to_string(options.mode);
  manifest.config["side"] = to_string(options.side);
  manifest.config["unilateral_form"] = f.squared ? "squared" : "as_printed";
  manifest.config["nodes"] = f.nodes;
  manifest.config["window_length"] = window_length;
  manifest.config["begin"] = f.begin;
  if (std::isfinite(f.end)) manifest.config["end"] = f.end;
  manifest.config["regressor"] = to_json(models.config());
  manifest.seeds["model_seed"] = models.config().seed;
  manifest.inputs["model"] = f.model;
  manifest.inputs["stream"] = f.stream;
  manifest.outputs["scores"] = f.out;
  manifest.outputs["bands"] = band_files;
  manifest.result["instances"] = detections.size();
  manifest.result["anomalies"] = flagged;
  manifest.write(f.out + ".manifest.json");

  std::cout << flagged << " of " << detections.size() << " (node, window) pairs flagged\n";
  return 0;
}

int cmd_baseline(const BaselineFlags& f, RunManifest& manifest) {
  const BaselineMethod method = parse_baseline_method(f.method);
  if (method == BaselineMethod::scan_batch && f.train.empty()) {
    throw ConfigError("scan-batch needs --train");
  }
  BaselineOptions options;
  options.lookback = f.window;
  options.side = parse_side(f.side);
  options.alpha = f.alpha;
  options.z_threshold = f.z_threshold;

  const ParsedStream parsed = read_stream_file(f.stream);
  const double window_length = resolve_window_length(f.window_length, parsed);
  const WindowedStream windows(parsed.stream, window_length);
  std::optional<WindowedStream> training;
  if (!f.train.empty()) {
    ParsedStream t = read_stream_file(f.train);
    training.emplace(std::move(t.stream), window_length);
  }
  const auto table =
      baseline_scores(method, windows, options, training ? &*training : nullptr);
  {
    auto out = open_output(f.out);
    write_baseline_csv(out, table);
  }

  manifest.config["method"] = to_string(method);
  manifest.config["side"] = to_string(options.side);
  manifest.config["window"] = options.lookback;
  manifest.config["alpha"] = options.alpha;
  manifest.config["z_threshold"] = options.z_threshold;
  manifest.config["window_length"] = window_length;
  manifest.inputs["stream"] = f.stream;
  if (!f.train.empty()) manifest.inputs["train"] = f.train;
  manifest.outputs["scores"] = f.out;
  manifest.write(f.out + ".manifest.json");

  std::cout << "scored " << table.entries.size() << " (node, window) pairs with "
            << to_string(method) << '\n';
  return 0;
}

int cmd_evaluate(const EvaluateFlags& f, RunManifest& manifest) {
  const LabelTable labels = read_labels_csv_file(f.labels);
  std::vector<NamedScores> methods;
  Json inputs = Json::array();
  for (const auto& spec : f.scores) {
    const auto eq = spec.find('=');
    NamedScores named;
    std::string path;
    if (eq == std::string::npos) {
      path = spec;
      named.method = fs::path(spec).stem().string();
    } else {
      named.method = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    }
    if (named.method.empty() || path.empty()) {
      throw ConfigError("--scores expects NAME=PATH or PATH, got '" + spec + "'");
    }
    if (!fs::exists(path)) throw ConfigError("score file '" + path + "' does not exist");
    named.scores = read_score_csv_file(path);
    inputs.push_back({{"method", named.method}, {"path", path}});
    methods.push_back(std::move(named));
  }
  const ComparisonReport report = compare(methods, labels);

  const fs::path dir(f.out);
  fs::create_directories(dir);
  const std::string roc_path = (dir / "roc.csv").string();
  const std::string auc_path = (dir / "auc.csv").string();
  {
    auto out = open_output(roc_path);
    write_roc_csv(out, report);
  }
  {
    auto out = open_output(auc_path);
    write_auc_csv(out, report);
  }

  manifest.inputs["labels"] = f.labels;
  manifest.inputs["scores"] = inputs;
  manifest.outputs["roc"] = roc_path;
  manifest.outputs["auc"] = auc_path;
  for (const auto& r : report.results) manifest.result["auc"][r.method] = r.auc;
  manifest.write((dir / "manifest.json").string());

  for (const auto& r : report.results) std::cout << r.method << ' ' << format_double(r.auc) << '\n';
  return 0;
}

int dispatch(const std::vector<std::string>& args, int depth);

// Re-runs the argv recorded in a manifest.
int cmd_replay(const std::string& path, int depth) {
  if (depth > 0) throw ConfigError("a replayed command cannot itself be a replay");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("argv") || !j["argv"].is_array() || j["argv"].empty()) {
    throw ConfigError("manifest '" + path + "' has no argv");
  }
  return dispatch(j["argv"].get<std::vector<std::string>>(), depth + 1);
}

void add_time_range(CLI::App* app, double& begin, double& end) {
  app->add_option("--begin", begin, "Ignore events before this timestamp")->capture_default_str();
  app->add_option("--end", end, "Ignore events at or after this timestamp");
}

int dispatch(const std::vector<std::string>& args, int depth) {
  CLI::App app{"Node-level anomaly detection in clique streams", "cliquewatch"};
  app.set_version_flag("--version", CLIQUEWATCH_VERSION);
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic stream");
  simulate->add_option("--preset", sim.preset, "E1 | E2 | E3");
  simulate->add_option("--config", sim.config_path, "key = value simulation config")
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Event seed")->capture_default_str();
  simulate->add_option("--layout-seed", sim.layout_seed,
                       "Seed for the mixture and node locations (default 2019)");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_flag("--no-oracle", sim.no_oracle, "Skip oracle.jsonl");

  TrainFlags tr;
  auto* train = app.add_subcommand("train", "Fit one conditional model per node");
  train->add_option("--stream", tr.stream, "Training stream (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--out", tr.out, "Model file")->required();
  add_time_range(train, tr.begin, tr.end);
  tr.regressor.add(train);

  CalibrateFlags cal;
  auto* calibrate = app.add_subcommand("calibrate", "Choose delta for a target false positive rate");
  calibrate->add_option("--stream", cal.stream, "Normal training stream (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate->add_option("--target-fpr", cal.target_fpr, "Acceptable false positive rate")
      ->capture_default_str();
  calibrate->add_option("--folds", cal.folds, "Cross-validation folds")->capture_default_str();
  calibrate->add_option("--mode", cal.mode, "plugin | theorem | theorem_closed")
      ->capture_default_str();
  calibrate->add_option("--side", cal.side, "bilateral | unilateral")->capture_default_str();
  calibrate->add_option("--window-length", cal.window_length,
                        "Window duration (default: stream header, else 86400)");
  calibrate->add_option("--out", cal.out, "Per-delta FPR table (CSV)")->capture_default_str();
  add_time_range(calibrate, cal.begin, cal.end);
  cal.regressor.add(calibrate);

  DetectFlags det;
  auto* detect = app.add_subcommand("detect", "Score every (node, window) pair of a stream");
  detect->add_option("--model", det.model, "Model file from train")
      ->required()
      ->check(CLI::ExistingFile);
  detect->add_option("--stream", det.stream, "Stream to score (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  detect->add_option("--delta", det.delta, "Confidence level in (0, 1)")->capture_default_str();
  detect->add_option("--mode", det.mode, "plugin | theorem | theorem_closed")
      ->capture_default_str();
  detect->add_option("--side", det.side, "bilateral | unilateral")->capture_default_str();
  detect->add_flag("--squared", det.squared, "Unilateral score with a squared deviation");
  detect->add_option("--nodes", det.nodes, "all, or a comma separated node list")
      ->capture_default_str();
  detect->add_option("--out", det.out, "Score CSV")->required();
  detect->add_option("--bands", det.bands, "Band CSV directory (default: <out>.bands)");
  detect->add_option("--window-length", det.window_length,
                     "Window duration (default: stream header, else 86400)");
  detect->add_option("--threads", det.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  add_time_range(detect, det.begin, det.end);

  BaselineFlags base;
  auto* baseline = app.add_subcommand("baseline", "Score a stream with a reference method");
  baseline->add_option("--method", base.method, "heard-node | heard-edge | scan | scan-batch")
      ->required();
  baseline->add_option("--stream", base.stream, "Stream to score (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  baseline->add_option("--train", base.train, "Training stream for scan-batch")
      ->check(CLI::ExistingFile);
  baseline->add_option("--window", base.window, "Scan lookback in windows")
      ->capture_default_str();
  baseline->add_option("--side", base.side, "bilateral | unilateral")->capture_default_str();
  baseline->add_option("--alpha", base.alpha, "p-value threshold for heard-*")
      ->capture_default_str();
  baseline->add_option("--z-threshold", base.z_threshold, "z threshold for scan*")
      ->capture_default_str();
  baseline->add_option("--window-length", base.window_length,
                       "Window duration (default: stream header, else 86400)");
  baseline->add_option("--out", base.out, "Score CSV")->required();

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "ROC curves and AUC against labels");
  evaluate->add_option("--scores", ev.scores, "NAME=PATH or PATH, repeatable")->required();
  evaluate->add_option("--labels", ev.labels, "node,window,label CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "Output directory")->required();

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "manifest JSON")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunManifest manifest;
  manifest.argv = args;
  manifest.command = app.get_subcommands().front()->get_name();

  if (simulate->parsed()) return cmd_simulate(sim, manifest);
  if (train->parsed()) return cmd_train(tr, manifest);
  if (calibrate->parsed()) return cmd_calibrate(cal, manifest);
  if (detect->parsed()) return cmd_detect(det, manifest);
  if (baseline->parsed()) return cmd_baseline(base, manifest);
  if (evaluate->parsed()) return cmd_evaluate(ev, manifest);
  return cmd_replay(replay_path, depth);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args, 0);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cliquewatch::cli
