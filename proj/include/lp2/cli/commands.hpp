#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lp2/cli/config.hpp"
#include "lp2/ctmc/ctmc.hpp"
#include "lp2/spatial/spatial.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::cli {

struct GridOptions {
  std::vector<double> times{0.0, 5.0, 10.0, 20.0, 30.0, 60.0};
  double resolution = 0.25;  // m
  double margin = 1.0;       // m
};

/// Where the prediction starts: an explicit position (with no observed
/// past) or the split point of a recorded trajectory.
struct StartOptions {
  std::optional<Vec2> start;
  std::string record;
};

struct Prediction {
  tree::InteractionTree tree;  // grounded
  spatial::SpatioTemporalDistribution distribution;
  std::vector<spatial::DiscreteTrajectory> trajectories;
};

/// Scene text on `out`.
void cmd_describe(const RunConfig& config, std::ostream& out);

/// Tree, CTMC distribution and top-n trajectories for one start.
Prediction predict(const RunConfig& config, const StartOptions& start);

/// tree.json, density.csv, trajectories.csv and manifest.json in `dir`.
void cmd_predict(const RunConfig& config, const StartOptions& start, const GridOptions& grid,
                 const std::filesystem::path& dir, std::ostream& out);

/// Density grid CSV to `file`, or to `out` when `file` is empty.
void cmd_export_grid(const RunConfig& config, const StartOptions& start, const GridOptions& grid,
                     const std::filesystem::path& file, std::ostream& out);

struct EvaluateOptions {
  std::string dataset;
  std::vector<std::string> subsets;
  bool constant_velocity = false;
  bool random_walk = false;
  bool random_goal = false;
  int jobs = 1;
};

/// Report CSVs plus manifest.json in `dir`; a summary on `out`.
void cmd_evaluate(const RunConfig& config, const EvaluateOptions& options,
                  const std::filesystem::path& dir, std::ostream& out);

/// Dataset summary table as CSV on `out`.
void cmd_stats(const RunConfig& config, const std::string& dataset, std::ostream& out);

/// Parses arguments (without the program name), runs the subcommand and
/// maps failures to exit codes: 1 configuration, 2 input data, 3 predictor
/// transport.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lp2::cli
