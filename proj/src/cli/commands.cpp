#include "lp2/cli/commands.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "lp2/dsg/scene_text.hpp"
#include "lp2/eval/dataset.hpp"
#include "lp2/eval/statistics.hpp"
#include "lp2/predictor/fixture_predictor.hpp"

namespace lp2::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct StartPoint {
  dsg::SceneGraph graph;
  Vec2 position;
  std::vector<predictor::PastInteraction> past;
  nlohmann::json inputs;
};

StartPoint resolve_start(const RunConfig& config, const StartOptions& start) {
  if (start.start.has_value() == !start.record.empty()) {
    throw ConfigError("give exactly one of --start or --record");
  }
  if (start.start) {
    if (config.scene.empty()) throw ConfigError("--scene is required");
    return {dsg::load_scene_graph(config.scene), *start.start, {},
            {{"start", {start.start->x, start.start->y}}}};
  }
  auto dataset = eval::load_dataset(start.record);
  if (dataset.records.size() != 1) {
    throw ValidationError(start.record + ": expected a single record, found " +
                          std::to_string(dataset.records.size()));
  }
  const auto& record = dataset.records.front();
  const auto split = eval::split_past_future(record);
  std::vector<predictor::PastInteraction> past;
  for (const auto& in : split.past_interactions) past.push_back({in.object, in.action, in.duration()});
  auto graph = config.scene.empty() ? dataset.scene_of(record) : dsg::load_scene_graph(config.scene);
  return {std::move(graph), split.current, std::move(past),
          {{"record", start.record}, {"t_split", split.t_split}}};
}

Prediction predict_from(const RunConfig& config, const StartPoint& sp) {
  validate(config);
  const auto eval = eval_config(config);
  const auto predictor = make_predictor(config);
  auto raw = tree::build_tree(sp.graph, *predictor, sp.position, sp.past, eval.tree,
                              predictor_config(config));
  auto grounded = tree::ground_paths(raw, sp.graph, eval.grounding);
  auto chain = ctmc::build_generator(grounded, {config.v_walk, config.no_interaction_times});
  auto trajectories = spatial::top_n_trajectories(
      grounded, chain, static_cast<std::size_t>(config.trajectories), config.dt, eval.mode,
      config.horizon, config.seed);
  auto dist = spatial::SpatioTemporalDistribution::from_tree(grounded, std::move(chain), config.sigma);
  return {std::move(grounded), std::move(dist), std::move(trajectories)};
}

nlohmann::json grid_json(const GridOptions& grid) {
  return {{"times", grid.times}, {"resolution", grid.resolution}, {"margin", grid.margin}};
}

}  // namespace

void cmd_describe(const RunConfig& config, std::ostream& out) {
  validate(config);
  if (config.scene.empty()) throw ConfigError("--scene is required");
  const auto graph = dsg::load_scene_graph(config.scene);
  out << dsg::describe_scene(graph, dsg::parse_granularity(config.granularity));
}

Prediction predict(const RunConfig& config, const StartOptions& start) {
  return predict_from(config, resolve_start(config, start));
}

void cmd_predict(const RunConfig& config, const StartOptions& start, const GridOptions& grid,
                 const fs::path& dir, std::ostream& out) {
  const auto sp = resolve_start(config, start);
  auto inputs = sp.inputs;
  inputs["grid"] = grid_json(grid);
  const auto m = manifest(config, "predict", inputs);
  const auto hash = manifest_hash(m);
  const auto prediction = predict_from(config, sp);

  auto tree_doc = tree::to_json(prediction.tree);
  tree_doc["manifest"] = hash;
  tree_doc["sequences"] = prediction.tree.leaves().size();
  open_output(dir / "tree.json") << tree_doc.dump(2) << '\n';

  const auto spec = spatial::default_grid(prediction.distribution, grid.margin, grid.resolution, grid.times);
  {
    auto f = open_output(dir / "density.csv");
    spatial::write_density_grid(f, prediction.distribution, spec, hash);
  }
  {
    auto f = open_output(dir / "trajectories.csv");
    spatial::write_trajectories(f, prediction.trajectories, hash);
  }
  open_output(dir / "manifest.json") << nlohmann::json{{"hash", hash}, {"manifest", m}}.dump(2) << '\n';

  out << "manifest " << hash << '\n';
  out << "interactions " << prediction.tree.interaction_count() << '\n';
  out << "sequences " << prediction.tree.leaves().size() << '\n';
  out << "states " << prediction.distribution.chain().size() << '\n';
  for (const auto& w : prediction.tree.warnings) out << "warning " << w << '\n';
}

void cmd_export_grid(const RunConfig& config, const StartOptions& start, const GridOptions& grid,
                     const fs::path& file, std::ostream& out) {
  const auto sp = resolve_start(config, start);
  auto inputs = sp.inputs;
  inputs["grid"] = grid_json(grid);
  const auto hash = manifest_hash(manifest(config, "export-grid", inputs));
  const auto prediction = predict_from(config, sp);
  const auto spec = spatial::default_grid(prediction.distribution, grid.margin, grid.resolution, grid.times);
  if (file.empty()) {
    spatial::write_density_grid(out, prediction.distribution, spec, hash);
  } else {
    auto f = open_output(file);
    spatial::write_density_grid(f, prediction.distribution, spec, hash);
  }
}

void cmd_evaluate(const RunConfig& config, const EvaluateOptions& options, const fs::path& dir,
                  std::ostream& out) {
  validate(config);
  if (options.dataset.empty()) throw ConfigError("--dataset is required");
  auto dataset = eval::load_dataset(options.dataset);
  const auto loaded = dataset.records.size();
  for (const auto& s : options.subsets) {
    dataset = eval::subset_filter(dataset, eval::parse_subset(s));
  }

  auto ecfg = eval_config(config);
  ecfg.constant_velocity = options.constant_velocity;
  ecfg.random_walk = options.random_walk;
  ecfg.random_goal = options.random_goal;

  std::unique_ptr<predictor::Predictor> predictor;
  if (ecfg.oracle == eval::Oracle::none) predictor = make_predictor(config);

  const auto m = manifest(config, "evaluate",
                          {{"dataset", options.dataset},
                           {"subsets", options.subsets},
                           {"baselines", {{"constant_velocity", options.constant_velocity},
                                          {"random_walk", options.random_walk},
                                          {"random_goal", options.random_goal}}}});
  const auto hash = manifest_hash(m);
  const auto report =
      eval::evaluate_dataset(dataset, predictor.get(), predictor_config(config), ecfg, options.jobs);
  eval::write_report(report, dir, hash);

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) failures.push_back({{"record", f.record}, {"reason", f.reason}});
  open_output(dir / "manifest.json")
      << nlohmann::json{{"hash", hash},
                        {"manifest", m},
                        {"records", {{"loaded", loaded},
                                     {"selected", dataset.records.size()},
                                     {"evaluated", report.records.size()},
                                     {"failed", report.failures.size()}}},
                        {"failures", failures}}
             .dump(2)
      << '\n';

  out << "manifest " << hash << '\n';
  out << "records " << report.records.size() << " evaluated, " << report.failures.size()
      << " failed, " << (loaded - dataset.records.size()) << " filtered\n";
  for (const auto& f : report.failures) out << "failed " << f.record << ": " << f.reason << '\n';
}

void cmd_stats(const RunConfig& config, const std::string& dataset_path, std::ostream& out) {
  if (dataset_path.empty()) throw ConfigError("--dataset is required");
  const auto dataset = eval::load_dataset(dataset_path);
  const auto stats = eval::dataset_stats(dataset);
  out << "# manifest " << manifest_hash(manifest(config, "stats", {{"dataset", dataset_path}})) << '\n';
  out << "metric,mean,std,count\n";
  const auto row = [&](const char* name, const eval::MeanStd& v) {
    out << name << ',' << format_double(v.mean) << ',' << format_double(v.std) << ',' << v.count << '\n';
  };
  row("distance_m", stats.distance);
  row("duration_s", stats.duration);
  row("interactions", stats.interactions);
  row("path_efficiency", stats.path_efficiency);
  out << "normalized_levenshtein,";
  if (stats.normalized_levenshtein) out << format_double(*stats.normalized_levenshtein);
  out << ",," << stats.records << '\n';
}

namespace {

Vec2 parse_point(const std::string& text) {
  std::istringstream in(text);
  Vec2 p;
  char comma = 0;
  if (!(in >> p.x >> comma >> p.y) || comma != ',' || !(in >> std::ws).eof()) {
    throw ConfigError("expected a point as x,y, got '" + text + "'");
  }
  return p;
}

void add_run_options(CLI::App& app, RunConfig& c) {
  app.add_option("--scene", c.scene, "Scene graph JSON file");
  app.add_option("--predictor", c.predictor, "fixture | wire");
  app.add_option("--fixture", c.fixture, "Fixture predictor replies (JSON)");
  app.add_option("--endpoint", c.endpoint, "Chat-completion endpoint URL");
  app.add_option("--model", c.model, "Model name sent to the endpoint");
  app.add_option("--timeout", c.timeout_s, "Request timeout in seconds");
  app.add_option("--max-retries", c.max_retries, "Transport retries per request");
  app.add_option("--max-in-flight", c.max_in_flight, "Concurrent predictor requests");
  app.add_option("--width", c.width, "Candidates per prediction (W_I)");
  app.add_option("--depth", c.depth, "Interactions per sequence (D_I)");
  app.add_option("--instances", c.instances, "Closest instances per class (N_s)");
  app.add_option("--granularity", c.granularity, "semantic | instance");
  app.add_option("--distance", c.distance, "geodesic | euclidean instance ranking");
  app.add_option("--max-segment", c.max_segment, "Maximum path segment length in meters");
  app.add_option("--v-walk", c.v_walk, "Walking speed in m/s");
  app.add_option("--sigma", c.sigma, "Gaussian width of each state in meters");
  app.add_option("--dt", c.dt, "Time step in seconds");
  app.add_option("--horizon", c.horizon, "Prediction horizon in seconds");
  app.add_option("--trajectories", c.trajectories, "Number of discrete trajectories (Bo-N)");
  app.add_option("--mode", c.mode, "expected | sampled trajectories");
  app.add_option("--seed", c.seed, "Seed for every random draw");
  app.add_option("--tv-threshold", c.tv_threshold, "Steady-state TV threshold");
  app.add_flag("--squared-ade", c.squared_ade, "Average squared displacements");
  app.add_flag("--no-interaction-times", c.no_interaction_times, "Ablation: zero dwell at interactions");
  app.add_flag("--deterministic-walk", c.deterministic_walk, "Ablation: walk sequences without the CTMC");
  app.add_flag("--gt-semantic", c.gt_semantic, "Oracle: true future classes");
  app.add_flag("--gt-instance", c.gt_instance, "Oracle: true future objects");
}

void add_start_options(CLI::App& cmd, std::string& start, StartOptions& so) {
  cmd.add_option("--start", start, "Start position x,y");
  cmd.add_option("--record", so.record, "Trajectory record; predicts from its split point");
}

void add_grid_options(CLI::App& cmd, GridOptions& g) {
  cmd.add_option("--grid-times", g.times, "Times of the density slices")->delimiter(',');
  cmd.add_option("--grid-resolution", g.resolution, "Grid spacing in meters");
  cmd.add_option("--grid-margin", g.margin, "Padding around the states in meters");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interaction-driven long-term human motion prediction", "lp2"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI configuration file (command-line values win)");

  RunConfig config;
  add_run_options(app, config);

  auto* describe = app.add_subcommand("describe", "Print the scene text");
  describe->fallthrough();

  StartOptions start_opts;
  std::string start_text;
  GridOptions grid;
  std::string out_path;

  auto* predict_cmd = app.add_subcommand("predict", "Predict from a start position or record");
  predict_cmd->fallthrough();
  add_start_options(*predict_cmd, start_text, start_opts);
  add_grid_options(*predict_cmd, grid);
  predict_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* grid_cmd = app.add_subcommand("export-grid", "Write the density grid CSV");
  grid_cmd->fallthrough();
  add_start_options(*grid_cmd, start_text, start_opts);
  add_grid_options(*grid_cmd, grid);
  grid_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions on a dataset");
  evaluate->fallthrough();
  evaluate->add_option("--dataset", eval_opts.dataset, "Record file or directory")->required();
  evaluate->add_option("--subset", eval_opts.subsets,
                       "walking_at_start | future_distance_upper_quartile");
  evaluate->add_flag("--constant-velocity", eval_opts.constant_velocity, "Add the constant-velocity baseline");
  evaluate->add_flag("--random-walk", eval_opts.random_walk, "Add the random-walk baseline");
  evaluate->add_flag("--random-goal", eval_opts.random_goal, "Add the random-goal baseline");
  evaluate->add_option("--jobs", eval_opts.jobs, "Records evaluated in parallel");
  evaluate->add_option("--out", out_path, "Report directory")->required();

  std::string stats_dataset;
  auto* stats = app.add_subcommand("stats", "Summarize a dataset");
  stats->fallthrough();
  stats->add_option("--dataset", stats_dataset, "Record file or directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (!start_text.empty()) start_opts.start = parse_point(start_text);
    if (describe->parsed()) {
      cmd_describe(config, out);
    } else if (predict_cmd->parsed()) {
      cmd_predict(config, start_opts, grid, out_path, out);
    } else if (grid_cmd->parsed()) {
      cmd_export_grid(config, start_opts, grid, out_path, out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, eval_opts, out_path, out);
    } else if (stats->parsed()) {
      cmd_stats(config, stats_dataset, out);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ArgumentError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const predictor::TransportError& e) {
    err << "predictor transport error: " << e.what() << '\n';
    return kTransportError;
  } catch (const predictor::PredictionFormatError& e) {
    err << "predictor error: " << e.what() << '\n';
    return kTransportError;
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace lp2::cli
