#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/geometry.hpp"
#include "lp2/predictor/interaction.hpp"

namespace lp2::tree {

enum class NodeKind { root, interaction, path };

std::string_view to_string(NodeKind kind);

struct TreeNode {
  std::size_t id = 0;
  NodeKind kind = NodeKind::root;
  Vec2 position;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;

  // Probability of entering this branch at its branching point, normalized
  // among siblings. Set on interaction nodes and, after grounding, also on
  // the first node of each branch chain; 1 elsewhere.
  double branch_probability = 1.0;
  double duration_s = 0.0;      // interaction nodes: predicted tau
  double segment_length = 0.0;  // root/path nodes: length of the outgoing segment, meters
  int depth = 0;                // interactions between the root and this node, inclusive

  std::optional<dsg::NodeId> object;  // interaction nodes
  std::string action;                 // interaction nodes
  dsg::NodeId place;                  // anchor place (root and interaction nodes)
};

/// Raw predictor output behind an interaction node.
struct Provenance {
  predictor::InteractionCandidate predicted;  // as returned by the predictor
  double grounded_weight = 0.0;               // after inverse-distance weighting
};

struct InteractionTree {
  std::vector<TreeNode> nodes;  // ids are indices, breadth-first order
  std::size_t root = 0;
  int depth = 0;
  bool grounded = false;
  std::map<std::size_t, Provenance> provenance;  // keyed by interaction node id
  std::vector<std::string> warnings;             // pruned branches, dropped candidates

  const TreeNode& node(std::size_t id) const { return nodes.at(id); }
  std::vector<std::size_t> leaves() const;
  std::vector<std::size_t> interactions_at_depth(int depth) const;
  std::size_t interaction_count() const;
};

struct TreeParams {
  int max_candidates = 6;  // W_I
  int depth = 2;           // D_I
  int instances = 3;       // N_s
  predictor::Granularity granularity = predictor::Granularity::semantic;
  dsg::DistanceMode distance_mode = dsg::DistanceMode::geodesic;
  int max_parallel = 4;    // concurrent predictor calls per level
};

/// Expands the interaction tree level by level. Every frontier node is
/// queried with the observed past plus the interactions on its root path;
/// semantic replies are grounded to the N_s closest instances. Sibling
/// probabilities are normalized to sum to one.
///
/// Any predictor failure at the first level is rethrown. Deeper failures
/// prune the queried node (with a warning), its siblings are renormalized
/// and a parent left without children is pruned in turn.
InteractionTree build_tree(const dsg::SceneGraph& graph, predictor::Predictor& predictor,
                           Vec2 start, const std::vector<predictor::PastInteraction>& past,
                           const TreeParams& params);

/// As above, with explicit predictor settings (endpoint, retries, ...).
/// Granularity and W_I are still taken from `params`.
InteractionTree build_tree(const dsg::SceneGraph& graph, predictor::Predictor& predictor,
                           Vec2 start, const std::vector<predictor::PastInteraction>& past,
                           const TreeParams& params, const predictor::PredictorConfig& config);

struct GroundingParams {
  double max_segment_len = 1.0;    // meters
  double min_chain_length = 1e-6;  // shorter chains become direct edges
};

/// Inserts path nodes along the shortest place path between every parent
/// interaction (or the root) and each of its children, subdivided into
/// equal pieces of at most max_segment_len.
///
/// Root branches all start with a piece of common length s (the shortest
/// first piece across branches) so the root leaves each branch with exactly
/// its branch probability. For interaction parents the chain starts with a
/// path node at the parent position that carries the branch probability.
InteractionTree ground_paths(const InteractionTree& tree, const dsg::SceneGraph& graph,
                             const GroundingParams& params = {});

struct Sequence {
  std::vector<std::size_t> interactions;  // interaction node ids, root to leaf
  double probability = 0.0;
};

/// One entry per leaf; probabilities are products of interaction branch
/// probabilities, sorted descending (ties by id sequence).
std::vector<Sequence> enumerate_sequences(const InteractionTree& tree);

nlohmann::json to_json(const InteractionTree& tree);

}  // namespace lp2::tree
