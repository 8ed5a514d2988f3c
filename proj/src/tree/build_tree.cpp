#include <algorithm>
#include <exception>
#include <future>
#include <numeric>

#include "lp2/dsg/scene_text.hpp"
#include "lp2/error.hpp"
#include "lp2/predictor/grounding.hpp"
#include "lp2/predictor/prompt.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::tree {

namespace {

using predictor::Granularity;
using predictor::InteractionCandidate;

struct Outcome {
  std::vector<InteractionCandidate> candidates;
  std::exception_ptr error;
};

struct WorkNode {
  TreeNode node;
  bool alive = true;
  bool terminal = false;  // predictor reported no further interactions
  std::optional<Provenance> provenance;
};

std::vector<predictor::HistoryEntry> assumed_future(const std::vector<WorkNode>& work,
                                                    const dsg::SceneGraph& graph,
                                                    std::size_t id, Granularity granularity) {
  std::vector<predictor::HistoryEntry> out;
  for (auto cur = std::optional<std::size_t>(id); cur; cur = work[*cur].node.parent) {
    const auto& n = work[*cur].node;
    if (n.kind != NodeKind::interaction) continue;
    const auto& obj = graph.node(*n.object);
    out.push_back({granularity == Granularity::semantic ? obj.semantic_class : obj.instance_label,
                   n.action, n.duration_s});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void renormalize(std::vector<WorkNode>& work, std::size_t parent) {
  auto& children = work[parent].node.children;
  double total = 0.0;
  for (auto c : children) total += work[c].node.branch_probability;
  for (auto c : children) work[c].node.branch_probability /= total;
}

// Removes `id` from its parent and walks up while parents become empty.
void prune(std::vector<WorkNode>& work, std::size_t id) {
  while (true) {
    work[id].alive = false;
    const auto parent = *work[id].node.parent;
    auto& siblings = work[parent].node.children;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), id), siblings.end());
    if (!siblings.empty()) {
      renormalize(work, parent);
      return;
    }
    if (work[parent].node.kind == NodeKind::root) {
      throw InternalError("every branch of the interaction tree was pruned");
    }
    id = parent;
  }
}

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::root: return "root";
    case NodeKind::interaction: return "interaction";
    case NodeKind::path: return "path";
  }
  return "?";
}

std::vector<std::size_t> InteractionTree::leaves() const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes) {
    if (n.children.empty()) out.push_back(n.id);
  }
  return out;
}

std::vector<std::size_t> InteractionTree::interactions_at_depth(int d) const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::interaction && n.depth == d) out.push_back(n.id);
  }
  return out;
}

std::size_t InteractionTree::interaction_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const auto& n) { return n.kind == NodeKind::interaction; }));
}

InteractionTree build_tree(const dsg::SceneGraph& graph, predictor::Predictor& predictor,
                           Vec2 start, const std::vector<predictor::PastInteraction>& past,
                           const TreeParams& params) {
  return build_tree(graph, predictor, start, past, params, predictor::PredictorConfig{});
}

InteractionTree build_tree(const dsg::SceneGraph& graph, predictor::Predictor& predictor,
                           Vec2 start, const std::vector<predictor::PastInteraction>& past,
                           const TreeParams& params,
                           const predictor::PredictorConfig& predictor_config) {
  if (params.depth < 1) throw ArgumentError("build_tree: depth must be >= 1");
  if (params.max_candidates < 1) throw ArgumentError("build_tree: W_I must be >= 1");
  if (params.instances < 1) throw ArgumentError("build_tree: N_s must be >= 1");
  if (!is_finite(start)) throw ArgumentError("build_tree: start position is not finite");

  auto config = predictor_config;
  config.granularity = params.granularity;
  config.max_candidates = params.max_candidates;
  const auto scene_text = dsg::describe_scene(graph, params.granularity);
  const auto history = predictor::to_history(graph, past, params.granularity);

  InteractionTree tree;
  std::vector<WorkNode> work;
  {
    WorkNode root;
    root.node.kind = NodeKind::root;
    root.node.position = start;
    root.node.place = graph.nearest_place(start);
    work.push_back(std::move(root));
  }

  std::vector<std::size_t> frontier{0};
  for (int level = 1; level <= params.depth && !frontier.empty(); ++level) {
    std::vector<Outcome> outcomes(frontier.size());
    const auto batch = static_cast<std::size_t>(std::max(1, params.max_parallel));

    for (std::size_t begin = 0; begin < frontier.size(); begin += batch) {
      const auto end = std::min(frontier.size(), begin + batch);
      std::vector<std::future<Outcome>> pending;
      for (std::size_t i = begin; i < end; ++i) {
        predictor::PredictionRequest request{
            scene_text, history, assumed_future(work, graph, frontier[i], params.granularity)};
        auto call = [&predictor, &config, request = std::move(request)]() {
          Outcome o;
          try {
            o.candidates = predictor.predict_next(request, config);
          } catch (...) {
            o.error = std::current_exception();
          }
          return o;
        };
        if (end - begin == 1) {
          std::promise<Outcome> ready;
          ready.set_value(call());
          pending.push_back(ready.get_future());
        } else {
          pending.push_back(std::async(std::launch::async, std::move(call)));
        }
      }
      for (std::size_t i = begin; i < end; ++i) outcomes[i] = pending[i - begin].get();
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto parent_id = frontier[i];
      if (!work[parent_id].alive) continue;
      auto& outcome = outcomes[i];

      std::vector<std::string> warnings;
      std::vector<InteractionCandidate> grounded;
      std::vector<InteractionCandidate> originals;
      try {
        if (outcome.error) std::rethrow_exception(outcome.error);
        if (outcome.candidates.empty()) {
          work[parent_id].terminal = true;
          if (level == 1) throw InternalError("predictor returned no interactions for the root");
          continue;
        }
        outcome.candidates = predictor::finalize_candidates(std::move(outcome.candidates),
                                                            params.max_candidates, {});
        for (auto& c : outcome.candidates) {
          auto one = std::vector<InteractionCandidate>{c};
          auto g = params.granularity == Granularity::semantic
                       ? predictor::ground_semantic(one, graph, work[parent_id].node.place,
                                                    static_cast<std::size_t>(params.instances),
                                                    params.distance_mode)
                       : predictor::ground_instances(one, graph);
          for (auto& w : g.warnings) warnings.push_back(std::move(w));
          for (auto& gc : g.candidates) {
            grounded.push_back(std::move(gc));
            originals.push_back(c);
          }
        }
        if (grounded.empty()) {
          throw predictor::PredictionFormatError("no predicted interaction could be grounded",
                                                 std::string{});
        }
      } catch (const std::exception& e) {
        if (level == 1) throw;
        tree.warnings.push_back("pruned branch at node " + std::to_string(parent_id) + ": " +
                                e.what());
        prune(work, parent_id);
        continue;
      }
      for (auto& w : warnings) tree.warnings.push_back(std::move(w));

      std::vector<std::size_t> order(grounded.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = grounded[a];
        const auto& cb = grounded[b];
        if (ca.probability != cb.probability) return ca.probability > cb.probability;
        if (ca.target != cb.target) return ca.target < cb.target;
        return ca.action < cb.action;
      });

      double total = 0.0;
      for (const auto& c : grounded) total += c.probability;
      for (auto k : order) {
        const auto& c = grounded[k];
        WorkNode child;
        child.node.id = work.size();
        child.node.kind = NodeKind::interaction;
        child.node.parent = parent_id;
        child.node.object = *c.object;
        child.node.action = c.action;
        child.node.duration_s = c.duration_s;
        child.node.branch_probability = c.probability / total;
        child.node.depth = level;
        child.node.place = graph.anchor_place(*c.object);
        child.node.position = graph.node(child.node.place).position;
        child.provenance = Provenance{originals[k], c.probability};
        work[parent_id].node.children.push_back(child.node.id);
        next.push_back(child.node.id);
        work.push_back(std::move(child));
      }
    }
    frontier.clear();
    for (auto id : next) {
      if (work[id].alive) frontier.push_back(id);
    }
  }

  // Compact surviving nodes into breadth-first ids.
  std::vector<std::size_t> remap(work.size(), work.size());
  std::vector<std::size_t> queue{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto old = queue[head];
    remap[old] = head;
    for (auto c : work[old].node.children) {
      if (work[c].alive) queue.push_back(c);
    }
  }
  tree.nodes.reserve(queue.size());
  for (auto old : queue) {
    TreeNode n = work[old].node;
    n.id = remap[old];
    if (n.parent) n.parent = remap[*n.parent];
    std::vector<std::size_t> kids;
    for (auto c : n.children) {
      if (work[c].alive) kids.push_back(remap[c]);
    }
    n.children = std::move(kids);
    if (work[old].provenance) tree.provenance.emplace(n.id, *work[old].provenance);
    tree.nodes.push_back(std::move(n));
  }
  tree.root = 0;
  tree.depth = params.depth;
  return tree;
}

}  // namespace lp2::tree
