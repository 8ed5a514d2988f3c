#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/eval/dataset.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::eval {

inline constexpr std::size_t kTopK = 10;

/// Hits for the first and second true future interaction, keyed by class
/// (semantic) or object id (instance). Absent when the record has no such
/// interaction or the tree is too shallow.
struct TopKAccuracy {
  std::optional<bool> first_semantic;
  std::optional<bool> first_instance;
  std::optional<bool> second_semantic;
  std::optional<bool> second_instance;
};

/// Keys ranked by aggregated probability at `depth` (1 = next interaction,
/// 2 = marginal over the interaction after it). Ties by key.
std::vector<std::pair<std::string, double>> ranked_interactions(const tree::InteractionTree& tree,
                                                                const dsg::SceneGraph& graph,
                                                                int depth, bool semantic);

TopKAccuracy interaction_top10_accuracy(const tree::InteractionTree& tree,
                                        const dsg::SceneGraph& graph,
                                        const std::vector<TimedInteraction>& gt_future);

}  // namespace lp2::eval
