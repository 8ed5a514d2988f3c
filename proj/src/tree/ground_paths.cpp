#include <algorithm>
#include <cmath>
#include <functional>

#include "lp2/error.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::tree {

namespace {

struct Polyline {
  std::vector<Vec2> points;
  std::vector<double> cumulative;  // arc length at each point

  double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

  Vec2 at(double arc) const {
    if (arc <= 0.0) return points.front();
    if (arc >= length()) return points.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), arc);
    const auto i = static_cast<std::size_t>(it - cumulative.begin());
    const double seg = cumulative[i] - cumulative[i - 1];
    return lerp(points[i - 1], points[i], (arc - cumulative[i - 1]) / seg);
  }
};

Polyline make_polyline(const std::vector<Vec2>& raw) {
  Polyline p;
  for (const auto& pt : raw) {
    if (!p.points.empty() && p.points.back() == pt) continue;
    p.cumulative.push_back(p.points.empty() ? 0.0
                                            : p.cumulative.back() + distance(p.points.back(), pt));
    p.points.push_back(pt);
  }
  return p;
}

// `length` split into the fewest equal pieces not exceeding max_len.
std::vector<double> equal_pieces(double length, double max_len) {
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / max_len - 1e-9)));
  return std::vector<double>(n, length / static_cast<double>(n));
}

}  // namespace

InteractionTree ground_paths(const InteractionTree& tree, const dsg::SceneGraph& graph,
                             const GroundingParams& params) {
  if (!(params.max_segment_len > 0.0)) throw ArgumentError("ground_paths: max_segment_len must be > 0");
  if (tree.grounded) throw ArgumentError("ground_paths: tree is already grounded");
  if (tree.nodes.empty()) throw ArgumentError("ground_paths: empty tree");

  InteractionTree out;
  out.depth = tree.depth;
  out.grounded = true;
  out.warnings = tree.warnings;

  const auto add = [&](TreeNode n, std::optional<std::size_t> parent) {
    n.id = out.nodes.size();
    n.parent = parent;
    n.children.clear();
    if (parent) out.nodes[*parent].children.push_back(n.id);
    out.nodes.push_back(std::move(n));
    return out.nodes.back().id;
  };

  // Breadth-first over the ungrounded tree: (old id, new id).
  std::vector<std::pair<std::size_t, std::size_t>> queue;
  queue.emplace_back(tree.root, add(tree.node(tree.root), std::nullopt));
  out.root = 0;

  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [old_id, new_id] = queue[head];
    const auto& parent = tree.node(old_id);
    if (parent.children.empty()) continue;
    const bool from_root = parent.kind == NodeKind::root;

    std::vector<Polyline> lines;
    for (auto c : parent.children) {
      const auto& child = tree.node(c);
      const auto path = graph.shortest_path(parent.place, child.place);
      std::vector<Vec2> pts;
      if (from_root) pts.push_back(parent.position);
      for (const auto& wp : path.waypoints) pts.push_back(graph.node(wp).position);
      lines.push_back(make_polyline(pts));
    }

    std::vector<std::vector<double>> pieces(lines.size());
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].length() > params.min_chain_length) {
        pieces[k] = equal_pieces(lines[k].length(), params.max_segment_len);
      }
    }

    if (from_root) {
      // Common first piece so that the root's exit splits exactly by branch
      // probability.
      double s = params.max_segment_len;
      bool any = false;
      for (const auto& p : pieces) {
        if (p.empty()) continue;
        s = any ? std::min(s, p.front()) : p.front();
        any = true;
      }
      for (std::size_t k = 0; k < lines.size(); ++k) {
        if (pieces[k].empty() || pieces[k].front() <= s) continue;
        const double rest = lines[k].length() - s;
        pieces[k] = {s};
        if (rest > params.min_chain_length) {
          for (double p : equal_pieces(rest, params.max_segment_len)) pieces[k].push_back(p);
        }
      }
      out.nodes[new_id].segment_length = s;
    }

    for (std::size_t k = 0; k < parent.children.size(); ++k) {
      const auto& child = tree.node(parent.children[k]);
      const auto& line = lines[k];
      const auto& segs = pieces[k];
      std::size_t attach = new_id;
      double arc = 0.0;
      // The root doubles as the first station of each of its chains.
      for (std::size_t i = 0; i < segs.size(); ++i) {
        if (i == 0 && from_root) {
          arc += segs[i];
          continue;
        }
        TreeNode pn;
        pn.kind = NodeKind::path;
        pn.position = line.at(arc);
        pn.segment_length = segs[i];
        pn.depth = parent.depth;
        const bool first = from_root ? i == 1 : i == 0;
        pn.branch_probability = first ? child.branch_probability : 1.0;
        attach = add(std::move(pn), attach);
        arc += segs[i];
      }
      const auto child_new = add(child, attach);
      queue.emplace_back(parent.children[k], child_new);
      if (auto it = tree.provenance.find(parent.children[k]); it != tree.provenance.end()) {
        out.provenance.emplace(child_new, it->second);
      }
    }
  }

  // Renumber breadth-first so ids stay topologically sorted by level.
  std::vector<std::size_t> order{out.root};
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (auto c : out.nodes[order[head]].children) order.push_back(c);
  }
  std::vector<std::size_t> remap(out.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = i;
  std::vector<TreeNode> renumbered;
  renumbered.reserve(order.size());
  for (auto old : order) {
    TreeNode n = out.nodes[old];
    n.id = remap[old];
    if (n.parent) n.parent = remap[*n.parent];
    for (auto& c : n.children) c = remap[c];
    renumbered.push_back(std::move(n));
  }
  std::map<std::size_t, Provenance> prov;
  for (auto& [id, p] : out.provenance) prov.emplace(remap[id], std::move(p));
  out.nodes = std::move(renumbered);
  out.provenance = std::move(prov);
  out.root = 0;
  return out;
}

std::vector<Sequence> enumerate_sequences(const InteractionTree& tree) {
  std::vector<Sequence> out;
  std::vector<std::size_t> stack_ids;
  std::function<void(std::size_t, double)> visit = [&](std::size_t id, double prob) {
    const auto& n = tree.node(id);
    if (n.kind == NodeKind::interaction) {
      prob *= n.branch_probability;
      stack_ids.push_back(id);
    }
    if (n.children.empty()) {
      out.push_back({stack_ids, prob});
    } else {
      for (auto c : n.children) visit(c, prob);
    }
    if (n.kind == NodeKind::interaction) stack_ids.pop_back();
  };
  visit(tree.root, 1.0);
  std::stable_sort(out.begin(), out.end(), [](const Sequence& a, const Sequence& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.interactions < b.interactions;
  });
  return out;
}

nlohmann::json to_json(const InteractionTree& tree) {
  nlohmann::json doc;
  doc["version"] = "tree-v1";
  doc["depth"] = tree.depth;
  doc["grounded"] = tree.grounded;
  doc["root"] = tree.root;
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    nlohmann::json j{{"id", n.id},
                     {"kind", std::string(to_string(n.kind))},
                     {"position", {n.position.x, n.position.y}},
                     {"parent", n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr)},
                     {"children", n.children},
                     {"branch_probability", n.branch_probability},
                     {"depth", n.depth}};
    if (n.kind == NodeKind::interaction) {
      j["object"] = *n.object;
      j["action"] = n.action;
      j["duration_s"] = n.duration_s;
      j["place"] = n.place;
      if (auto it = tree.provenance.find(n.id); it != tree.provenance.end()) {
        const auto& p = it->second.predicted;
        j["predicted"] = {{"target", p.target},
                          {"probability", p.probability},
                          {"duration_s", p.duration_s},
                          {"reasoning", p.reasoning}};
        j["grounded_weight"] = it->second.grounded_weight;
      }
    } else {
      j["segment_length"] = n.segment_length;
      if (n.kind == NodeKind::root) j["place"] = n.place;
    }
    nodes.push_back(std::move(j));
  }
  doc["warnings"] = tree.warnings;
  return doc;
}

}  // namespace lp2::tree
