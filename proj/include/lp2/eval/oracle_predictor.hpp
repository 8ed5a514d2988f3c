#pragma once

#include <vector>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/eval/dataset.hpp"
#include "lp2/predictor/interaction.hpp"

namespace lp2::eval {

/// Replays a record's true future: the k-th query along a branch (k
/// interactions already assumed) returns the k-th future interaction with
/// probability 1 and its recorded duration, and nothing once the record is
/// exhausted. Semantic mode names the class and leaves grounding to the
/// tree; instance mode names the object itself.
class GroundTruthPredictor : public predictor::Predictor {
 public:
  GroundTruthPredictor(const dsg::SceneGraph& graph, std::vector<TimedInteraction> future);

  std::vector<predictor::InteractionCandidate> predict_next(
      const predictor::PredictionRequest& request, const predictor::PredictorConfig& config) override;

 private:
  const dsg::SceneGraph& graph_;
  std::vector<TimedInteraction> future_;
};

}  // namespace lp2::eval
