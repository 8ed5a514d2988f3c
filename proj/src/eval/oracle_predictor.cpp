#include "lp2/eval/oracle_predictor.hpp"

namespace lp2::eval {

GroundTruthPredictor::GroundTruthPredictor(const dsg::SceneGraph& graph,
                                           std::vector<TimedInteraction> future)
    : graph_(graph), future_(std::move(future)) {
  for (const auto& in : future_) {
    const auto* obj = graph_.find(in.object);
    if (obj == nullptr || obj->layer != dsg::Layer::object) {
      throw ValidationError("ground-truth interaction references unknown object " + in.object);
    }
  }
}

std::vector<predictor::InteractionCandidate> GroundTruthPredictor::predict_next(
    const predictor::PredictionRequest& request, const predictor::PredictorConfig& config) {
  const auto k = request.assumed_future.size();
  if (k >= future_.size()) return {};
  const auto& in = future_[k];
  const auto& obj = graph_.node(in.object);
  predictor::InteractionCandidate c;
  c.granularity = config.granularity;
  if (config.granularity == predictor::Granularity::semantic) {
    c.target = obj.semantic_class;
  } else {
    c.target = obj.instance_label;
    c.object = obj.id;
  }
  c.action = in.action;
  c.probability = 1.0;
  c.duration_s = in.duration();
  c.reasoning = "ground truth";
  return {c};
}

}  // namespace lp2::eval
