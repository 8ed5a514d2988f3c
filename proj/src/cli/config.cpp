#include "lp2/cli/config.hpp"

#include <cmath>

#include "lp2/dsg/scene_text.hpp"
#include "lp2/hash.hpp"
#include "lp2/predictor/chat_predictor.hpp"
#include "lp2/predictor/fixture_predictor.hpp"
#include "lp2/predictor/prompt.hpp"

namespace lp2::cli {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be a positive number");
  }
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.predictor != "fixture" && c.predictor != "wire") {
    throw ConfigError("predictor must be 'fixture' or 'wire', got '" + c.predictor + "'");
  }
  if (c.granularity != "semantic" && c.granularity != "instance") {
    throw ConfigError("granularity must be 'semantic' or 'instance'");
  }
  if (c.distance != "geodesic" && c.distance != "euclidean") {
    throw ConfigError("distance must be 'geodesic' or 'euclidean'");
  }
  if (c.mode != "expected" && c.mode != "sampled") {
    throw ConfigError("mode must be 'expected' or 'sampled'");
  }
  require_positive(c.width, "width");
  require_positive(c.depth, "depth");
  require_positive(c.instances, "instances");
  require_positive(c.max_segment, "max-segment");
  require_positive(c.v_walk, "v-walk");
  require_positive(c.sigma, "sigma");
  require_positive(c.dt, "dt");
  require_positive(c.horizon, "horizon");
  require_positive(c.trajectories, "trajectories");
  require_positive(c.timeout_s, "timeout");
  require_positive(c.max_in_flight, "max-in-flight");
  if (c.max_retries < 0) throw ConfigError("max-retries must be >= 0");
  if (!(c.tv_threshold > 0.0 && c.tv_threshold <= 1.0)) {
    throw ConfigError("tv-threshold must lie in (0, 1]");
  }
  if (c.gt_semantic && c.gt_instance) {
    throw ConfigError("gt-semantic and gt-instance are mutually exclusive");
  }
}

tree::TreeParams tree_params(const RunConfig& c) {
  tree::TreeParams p;
  p.max_candidates = c.width;
  p.depth = c.depth;
  p.instances = c.instances;
  p.granularity = dsg::parse_granularity(c.granularity);
  p.distance_mode = c.distance == "euclidean" ? dsg::DistanceMode::euclidean : dsg::DistanceMode::geodesic;
  p.max_parallel = c.max_in_flight;
  return p;
}

predictor::PredictorConfig predictor_config(const RunConfig& c) {
  predictor::PredictorConfig p;
  p.granularity = dsg::parse_granularity(c.granularity);
  p.max_candidates = c.width;
  p.endpoint = c.endpoint;
  p.model = c.model;
  p.timeout_s = c.timeout_s;
  p.max_retries = c.max_retries;
  p.max_in_flight = c.max_in_flight;
  return p;
}

eval::EvalConfig eval_config(const RunConfig& c) {
  eval::EvalConfig e;
  e.tree = tree_params(c);
  e.grounding.max_segment_len = c.max_segment;
  e.v_walk = c.v_walk;
  e.sigma = c.sigma;
  e.dt = c.dt;
  e.horizon = c.horizon;
  e.best_of = {1, static_cast<std::size_t>(c.trajectories)};
  if (c.trajectories == 1) e.best_of = {1};
  e.mode = c.mode == "sampled" ? spatial::TrajectoryMode::sampled : spatial::TrajectoryMode::expected;
  e.seed = c.seed;
  e.squared_ade = c.squared_ade;
  e.tv_threshold = c.tv_threshold;
  e.no_interaction_times = c.no_interaction_times;
  e.deterministic_walk = c.deterministic_walk;
  e.oracle = c.gt_semantic   ? eval::Oracle::semantic
             : c.gt_instance ? eval::Oracle::instance
                             : eval::Oracle::none;
  return e;
}

std::unique_ptr<predictor::Predictor> make_predictor(const RunConfig& c) {
  if (c.predictor == "wire") {
    return std::make_unique<predictor::ChatCompletionPredictor>(predictor_config(c));
  }
  if (c.fixture.empty()) throw ConfigError("predictor 'fixture' needs --fixture <file>");
  return std::make_unique<predictor::FixturePredictor>(predictor::FixturePredictor::load(c.fixture));
}

nlohmann::json manifest(const RunConfig& c, std::string_view command, const nlohmann::json& inputs) {
  nlohmann::json predictor{{"kind", c.predictor}};
  if (c.predictor == "fixture") {
    predictor["fixture"] = c.fixture;
  } else {
    predictor["endpoint"] = c.endpoint;
    predictor["model"] = c.model;
    predictor["timeout_s"] = c.timeout_s;
    predictor["max_retries"] = c.max_retries;
  }
  predictor["max_in_flight"] = c.max_in_flight;
  return {
      {"command", std::string(command)},
      {"inputs", inputs},
      {"scene", c.scene},
      {"predictor", predictor},
      {"tree", {{"width", c.width}, {"depth", c.depth}, {"instances", c.instances},
                {"granularity", c.granularity}, {"distance", c.distance},
                {"max_segment", c.max_segment}}},
      {"motion", {{"v_walk", c.v_walk}, {"sigma", c.sigma}, {"dt", c.dt}, {"horizon", c.horizon},
                  {"trajectories", c.trajectories}, {"mode", c.mode}, {"seed", c.seed},
                  {"tv_threshold", c.tv_threshold}, {"squared_ade", c.squared_ade},
                  {"density_floor", eval::kDensityFloor}}},
      {"ablations", {{"no_interaction_times", c.no_interaction_times},
                     {"deterministic_walk", c.deterministic_walk},
                     {"gt_semantic", c.gt_semantic}, {"gt_instance", c.gt_instance}}},
      {"versions", {{"scene_text", std::string(dsg::kSceneTextVersion)},
                    {"prompt", std::string(predictor::kPromptVersion)},
                    {"tree", "tree-v1"}}},
  };
}

std::string manifest_hash(const nlohmann::json& m) { return hex64(fnv1a64(m.dump())); }

}  // namespace lp2::cli
