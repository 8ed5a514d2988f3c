#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lp2/eval/accuracy.hpp"
#include "lp2/eval/dataset.hpp"
#include "lp2/eval/metrics.hpp"
#include "lp2/predictor/interaction.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::eval {

enum class Oracle { none, semantic, instance };

struct EvalConfig {
  tree::TreeParams tree;
  tree::GroundingParams grounding;
  double v_walk = 1.4;    // m/s
  double sigma = 0.5;     // m
  double dt = 1.0;        // s
  double horizon = 60.0;  // s
  std::vector<std::size_t> best_of{1, 20};
  spatial::TrajectoryMode mode = spatial::TrajectoryMode::expected;
  std::uint64_t seed = 0;
  bool squared_ade = false;
  double tv_threshold = 0.05;
  double tv_t_max = 600.0;  // s
  std::vector<Window> windows = kDefaultWindows;

  // ablations, each evaluated as an extra method
  bool no_interaction_times = false;
  bool deterministic_walk = false;
  Oracle oracle = Oracle::none;  // replaces the configured predictor

  bool constant_velocity = false;
  bool random_walk = false;
  bool random_goal = false;
};

struct MethodResult {
  std::string method;
  NllCurve nll;
  std::vector<std::pair<std::size_t, WindowValues>> ade;  // (n, per window)
};

struct RecordResult {
  std::string record;
  double t_split = 0.0;
  std::size_t sequences = 0;  // leaves of the interaction tree
  std::vector<MethodResult> methods;
  std::optional<TopKAccuracy> accuracy;
  std::optional<double> steady_horizon;
};

struct RecordFailure {
  std::string record;
  std::string reason;
};

struct MetricsReport {
  std::vector<Window> windows;
  std::vector<RecordResult> records;
  std::vector<RecordFailure> failures;
  std::vector<std::string> subsets;
  double density_floor = kDensityFloor;
};

/// Seed for one record, independent of evaluation order.
std::uint64_t record_seed(std::uint64_t seed, const std::string& record);

/// Builds the prediction for one record and scores every enabled method.
/// `predictor` may be null when an oracle is configured.
RecordResult evaluate_record(const TrajectoryRecord& record, const dsg::SceneGraph& graph,
                             predictor::Predictor* predictor,
                             const predictor::PredictorConfig& predictor_config,
                             const EvalConfig& config);

/// Evaluates records on up to `jobs` threads. Failing records are listed
/// in the report instead of aborting the run.
MetricsReport evaluate_dataset(const Dataset& dataset, predictor::Predictor* predictor,
                               const predictor::PredictorConfig& predictor_config,
                               const EvalConfig& config, int jobs = 1);

/// nll_curve.csv, nll_windows.csv, ade.csv, accuracy.csv, records.csv.
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const MetricsReport& report,
                                                const std::filesystem::path& dir,
                                                const std::string& manifest_hash);

}  // namespace lp2::eval
