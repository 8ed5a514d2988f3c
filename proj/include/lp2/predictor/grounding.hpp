#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/predictor/interaction.hpp"

namespace lp2::predictor {

/// Distances below this are clamped before inverse-distance weighting.
inline constexpr double kMinGroundingDistance = 0.5;

struct GroundingResult {
  std::vector<InteractionCandidate> candidates;  // instance level, object set
  std::vector<std::string> warnings;             // dropped candidates
};

/// Expands each semantic candidate to the `n_s` closest instances of its
/// class (as seen from place `from`) and splits its probability by inverse
/// distance: w_j = p * (1/d_j) / sum_k (1/d_k), with d clamped at
/// kMinGroundingDistance. Classes absent from the scene are dropped.
GroundingResult ground_semantic(const std::vector<InteractionCandidate>& candidates,
                                const dsg::SceneGraph& graph, const dsg::NodeId& from,
                                std::size_t n_s,
                                dsg::DistanceMode mode = dsg::DistanceMode::geodesic);

/// Resolves instance candidates by object id or label; unknown targets are
/// dropped.
GroundingResult ground_instances(const std::vector<InteractionCandidate>& candidates,
                                 const dsg::SceneGraph& graph);

}  // namespace lp2::predictor
