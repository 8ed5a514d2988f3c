#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lp2/eval/harness.hpp"
#include "lp2/predictor/interaction.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInputError = 2, kTransportError = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything that influences a run's outputs. Output locations and the
/// job count are deliberately not part of it.
struct RunConfig {
  std::string scene;

  std::string predictor = "fixture";  // fixture | wire
  std::string fixture;
  std::string endpoint = predictor::PredictorConfig{}.endpoint;
  std::string model = predictor::PredictorConfig{}.model;
  double timeout_s = 60.0;
  int max_retries = 2;
  int max_in_flight = 4;

  int width = 6;      // W_I
  int depth = 2;      // D_I
  int instances = 3;  // N_s
  std::string granularity = "semantic";
  std::string distance = "geodesic";
  double max_segment = 1.0;  // m

  double v_walk = 1.4;    // m/s
  double sigma = 0.5;     // m
  double dt = 1.0;        // s
  double horizon = 60.0;  // s
  int trajectories = 20;  // Bo-N
  std::string mode = "expected";
  std::uint64_t seed = 0;
  double tv_threshold = 0.05;
  bool squared_ade = false;

  bool no_interaction_times = false;
  bool deterministic_walk = false;
  bool gt_semantic = false;
  bool gt_instance = false;
};

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

tree::TreeParams tree_params(const RunConfig& config);
predictor::PredictorConfig predictor_config(const RunConfig& config);
eval::EvalConfig eval_config(const RunConfig& config);

/// Fixture or chat-completion predictor. Throws ConfigError when the
/// fixture path is missing and ParseError when the file is malformed.
std::unique_ptr<predictor::Predictor> make_predictor(const RunConfig& config);

/// Canonical run manifest: every configuration value, the command, its
/// inputs and the template/prompt/export versions.
nlohmann::json manifest(const RunConfig& config, std::string_view command,
                        const nlohmann::json& inputs);

/// Hex FNV-1a of the compact manifest serialization (keys sorted).
std::string manifest_hash(const nlohmann::json& manifest);

}  // namespace lp2::cli
