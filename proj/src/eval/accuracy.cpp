#include "lp2/eval/accuracy.hpp"

#include <algorithm>
#include <map>

#include "lp2/error.hpp"

namespace lp2::eval {

using tree::NodeKind;

namespace {

// Product of interaction branch probabilities from the root to `id`.
double marginal(const tree::InteractionTree& tree, std::size_t id) {
  double p = 1.0;
  for (auto cur = std::optional<std::size_t>(id); cur; cur = tree.node(*cur).parent) {
    const auto& n = tree.node(*cur);
    if (n.kind == NodeKind::interaction) p *= n.branch_probability;
  }
  return p;
}

}  // namespace

std::vector<std::pair<std::string, double>> ranked_interactions(const tree::InteractionTree& tree,
                                                                const dsg::SceneGraph& graph,
                                                                int depth, bool semantic) {
  std::map<std::string, double> mass;
  for (auto id : tree.interactions_at_depth(depth)) {
    const auto& n = tree.node(id);
    const auto key = semantic ? graph.node(*n.object).semantic_class : *n.object;
    mass[key] += marginal(tree, id);
  }
  std::vector<std::pair<std::string, double>> out(mass.begin(), mass.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

TopKAccuracy interaction_top10_accuracy(const tree::InteractionTree& tree,
                                        const dsg::SceneGraph& graph,
                                        const std::vector<TimedInteraction>& gt_future) {
  if (tree.interaction_count() == 0) throw ArgumentError("top-10 accuracy: empty tree");
  const auto hit = [&](int depth, bool semantic) -> std::optional<bool> {
    const auto k = static_cast<std::size_t>(depth - 1);
    if (gt_future.size() <= k || tree.depth < depth) return std::nullopt;
    const auto& truth = gt_future[k].object;
    const auto key = semantic ? graph.node(truth).semantic_class : truth;
    const auto ranked = ranked_interactions(tree, graph, depth, semantic);
    const auto top = std::min(kTopK, ranked.size());
    return std::any_of(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
                       [&](const auto& r) { return r.first == key; });
  };
  return {hit(1, true), hit(1, false), hit(2, true), hit(2, false)};
}

}  // namespace lp2::eval
