#include "lp2/predictor/grounding.hpp"

#include <algorithm>

#include "lp2/error.hpp"

namespace lp2::predictor {

std::vector<HistoryEntry> to_history(const dsg::SceneGraph& graph,
                                     const std::vector<PastInteraction>& past,
                                     Granularity granularity) {
  std::vector<HistoryEntry> out;
  out.reserve(past.size());
  for (const auto& p : past) {
    const auto* node = graph.resolve_object(p.object);
    if (!node) throw ArgumentError("past interaction references unknown object '" + p.object + "'");
    out.push_back({granularity == Granularity::semantic ? node->semantic_class : node->instance_label,
                   p.action, p.duration_s});
  }
  return out;
}

GroundingResult ground_semantic(const std::vector<InteractionCandidate>& candidates,
                                const dsg::SceneGraph& graph, const dsg::NodeId& from,
                                std::size_t n_s, dsg::DistanceMode mode) {
  if (n_s == 0) throw ArgumentError("ground_semantic: N_s must be >= 1");
  GroundingResult result;
  for (const auto& c : candidates) {
    if (c.granularity != Granularity::semantic) {
      throw ArgumentError("ground_semantic: candidate '" + c.target + "' is not semantic");
    }
    const auto instances = graph.k_nearest_instances(c.target, from, n_s, mode);
    if (instances.empty()) {
      result.warnings.push_back("dropped '" + c.target + "' (" + c.action +
                                "): class not present in scene");
      continue;
    }
    double norm = 0.0;
    for (const auto& inst : instances) norm += 1.0 / std::max(inst.distance, kMinGroundingDistance);
    for (const auto& inst : instances) {
      InteractionCandidate g = c;
      g.granularity = Granularity::instance;
      g.object = inst.object;
      g.target = graph.node(inst.object).instance_label;
      g.probability = c.probability * (1.0 / std::max(inst.distance, kMinGroundingDistance)) / norm;
      result.candidates.push_back(std::move(g));
    }
  }
  return result;
}

GroundingResult ground_instances(const std::vector<InteractionCandidate>& candidates,
                                 const dsg::SceneGraph& graph) {
  GroundingResult result;
  for (const auto& c : candidates) {
    const auto* node = graph.resolve_object(c.object.value_or(c.target));
    if (!node) {
      result.warnings.push_back("dropped '" + c.target + "' (" + c.action +
                                "): no such object in scene");
      continue;
    }
    InteractionCandidate g = c;
    g.granularity = Granularity::instance;
    g.object = node->id;
    g.target = node->instance_label;
    result.candidates.push_back(std::move(g));
  }
  return result;
}

}  // namespace lp2::predictor
