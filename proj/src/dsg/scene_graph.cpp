#include "lp2/dsg/scene_graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "lp2/error.hpp"

namespace lp2::dsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Layer parse_layer(const std::string& s, const NodeId& id) {
  if (s == "object") return Layer::object;
  if (s == "place") return Layer::place;
  if (s == "room") return Layer::room;
  throw ParseError("node '" + id + "': unknown layer '" + s + "'");
}

NodeId parse_id(const nlohmann::json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(where + ": node id must be a string or integer");
}

}  // namespace

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::object: return "object";
    case Layer::place: return "place";
    case Layer::room: return "room";
  }
  return "?";
}

SceneGraph::SceneGraph(std::string name, std::vector<SceneNode> nodes,
                       std::vector<std::pair<NodeId, NodeId>> edges)
    : name_(std::move(name)), nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const SceneNode& a, const SceneNode& b) { return a.id < b.id; });

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (n.id.empty()) throw ParseError("node with empty id");
    if (!index_.emplace(n.id, i).second) throw ParseError("duplicate node id '" + n.id + "'");
    if (n.instance_label.empty()) n.instance_label = n.id;
    if (n.layer != Layer::place && n.semantic_class.empty()) {
      throw ValidationError("node '" + n.id + "': " + std::string(to_string(n.layer)) +
                            " requires a non-empty class");
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!label_index_.emplace(nodes_[i].instance_label, i).second) {
      throw ValidationError("duplicate instance label '" + nodes_[i].instance_label + "'");
    }
  }

  // Edges, normalized so that a < b and deduplicated.
  std::set<std::pair<NodeId, NodeId>> seen;
  for (auto& [a, b] : edges) {
    auto ia = index_.find(a);
    auto ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) {
      throw ParseError("edge [" + a + ", " + b + "] references an unknown node '" +
                       (ia == index_.end() ? a : b) + "'");
    }
    if (a == b) throw ParseError("edge [" + a + ", " + b + "] is a self loop");
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (!seen.insert(key).second) continue;
    const auto& na = nodes_[ia->second];
    const auto& nb = nodes_[ib->second];
    edges_.push_back({key.first, key.second,
                      na.layer == nb.layer ? EdgeKind::intra_layer : EdgeKind::inter_layer});
  }

  // Places layer.
  for (const auto& n : nodes_) {
    if (n.layer == Layer::place) {
      place_slot_.emplace(n.id, place_ids_.size());
      place_ids_.push_back(n.id);
    }
  }
  if (place_ids_.empty()) throw ValidationError("scene has no place nodes");
  place_adj_.resize(place_ids_.size());

  std::unordered_map<NodeId, std::vector<NodeId>> room_places;
  std::unordered_map<NodeId, std::vector<NodeId>> object_rooms;
  for (const auto& e : edges_) {
    const auto& na = node(e.a);
    const auto& nb = node(e.b);
    if (na.layer == Layer::place && nb.layer == Layer::place) {
      const double len = distance(na.position, nb.position);
      if (!(len > 0.0)) {
        throw ValidationError("place edge [" + e.a + ", " + e.b + "] has zero length");
      }
      const auto sa = place_slot_.at(e.a);
      const auto sb = place_slot_.at(e.b);
      place_adj_[sa].emplace_back(sb, len);
      place_adj_[sb].emplace_back(sa, len);
    } else if (na.layer == Layer::room && nb.layer == Layer::room) {
      room_adj_[e.a].push_back(e.b);
      room_adj_[e.b].push_back(e.a);
    } else if (na.layer == Layer::object && nb.layer == Layer::room) {
      object_rooms[e.a].push_back(e.b);
    } else if (na.layer == Layer::room && nb.layer == Layer::object) {
      object_rooms[e.b].push_back(e.a);
    } else if (na.layer == Layer::room && nb.layer == Layer::place) {
      room_places[e.a].push_back(e.b);
    } else if (na.layer == Layer::place && nb.layer == Layer::room) {
      room_places[e.b].push_back(e.a);
    }
  }
  for (auto& adj : place_adj_) std::sort(adj.begin(), adj.end());
  for (auto& [room, adj] : room_adj_) std::sort(adj.begin(), adj.end());

  for (auto& n : nodes_) {
    if (!is_finite(n.position)) {
      throw ValidationError("node '" + n.id + "' has a non-finite position");
    }
  }

  // Connectivity of the places layer.
  {
    std::vector<int> comp(place_ids_.size(), -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < place_ids_.size(); ++s) {
      if (comp[s] >= 0) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = ncomp;
      while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        for (auto [v, len] : place_adj_[u]) {
          if (comp[v] < 0) {
            comp[v] = ncomp;
            stack.push_back(v);
          }
        }
      }
      ++ncomp;
    }
    if (ncomp > 1) {
      std::ostringstream msg;
      msg << "places layer is disconnected (" << ncomp << " components):";
      for (int c = 0; c < ncomp; ++c) {
        msg << " {";
        bool first = true;
        for (std::size_t s = 0; s < place_ids_.size(); ++s) {
          if (comp[s] != c) continue;
          msg << (first ? "" : ", ") << place_ids_[s];
          first = false;
        }
        msg << "}";
      }
      throw ValidationError(msg.str());
    }
  }

  for (const auto& n : nodes_) {
    if (n.layer != Layer::object) continue;
    auto it = object_rooms.find(n.id);
    const std::size_t count = it == object_rooms.end() ? 0 : it->second.size();
    if (count != 1) {
      throw ValidationError("object '" + n.id + "' must have exactly one room edge, found " +
                            std::to_string(count));
    }
    object_room_.emplace(n.id, it->second.front());
    object_anchor_.emplace(n.id, nearest_place(n.position));
  }
}

const SceneNode& SceneGraph::node(const NodeId& id) const { return nodes_[index_of(id)]; }

const SceneNode* SceneGraph::find(const NodeId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const SceneNode* SceneGraph::resolve_object(std::string_view ref) const {
  const std::string key(ref);
  if (auto* n = find(key); n && n->layer == Layer::object) return n;
  auto it = label_index_.find(key);
  if (it != label_index_.end() && nodes_[it->second].layer == Layer::object) {
    return &nodes_[it->second];
  }
  return nullptr;
}

std::size_t SceneGraph::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ArgumentError("unknown node id '" + id + "'");
  return it->second;
}

std::size_t SceneGraph::place_slot(const NodeId& id) const {
  auto it = place_slot_.find(id);
  if (it == place_slot_.end()) throw ArgumentError("'" + id + "' is not a place node");
  return it->second;
}

std::vector<const SceneNode*> SceneGraph::nodes_in_layer(Layer layer) const {
  std::vector<const SceneNode*> out;
  for (const auto& n : nodes_) {
    if (n.layer == layer) out.push_back(&n);
  }
  return out;
}

std::vector<NodeId> SceneGraph::room_neighbors(const NodeId& room) const {
  auto it = room_adj_.find(room);
  return it == room_adj_.end() ? std::vector<NodeId>{} : it->second;
}

const NodeId& SceneGraph::room_of(const NodeId& object) const {
  auto it = object_room_.find(object);
  if (it == object_room_.end()) throw ArgumentError("'" + object + "' is not an object node");
  return it->second;
}

const NodeId& SceneGraph::anchor_place(const NodeId& object) const {
  auto it = object_anchor_.find(object);
  if (it == object_anchor_.end()) throw ArgumentError("'" + object + "' is not an object node");
  return it->second;
}

std::vector<NodeId> SceneGraph::place_neighbors(const NodeId& place) const {
  std::vector<NodeId> out;
  for (auto [v, len] : place_adj_[place_slot(place)]) out.push_back(place_ids_[v]);
  return out;
}

void SceneGraph::dijkstra(std::size_t source, std::vector<double>& dist,
                          std::vector<std::size_t>& prev) const {
  const auto n = place_ids_.size();
  dist.assign(n, kInf);
  prev.assign(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (auto [v, len] : place_adj_[u]) {
      const double nd = d + len;
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        queue.emplace(nd, v);
      }
    }
  }
}

PathResult SceneGraph::shortest_path(const NodeId& from, const NodeId& to) const {
  const auto a = place_slot(from);
  const auto b = place_slot(to);
  // Always search from the smaller slot so that a->b and b->a share one
  // summation order and agree bit for bit.
  const auto src = std::min(a, b);
  const auto dst = std::max(a, b);
  std::vector<double> dist;
  std::vector<std::size_t> prev;
  dijkstra(src, dist, prev);
  if (!std::isfinite(dist[dst])) {
    throw InternalError("no path between places '" + from + "' and '" + to + "'");
  }
  PathResult result;
  result.length = dist[dst];
  for (auto s = dst; s != place_ids_.size(); s = prev[s]) {
    result.waypoints.push_back(place_ids_[s]);
    if (s == src) break;
  }
  // waypoints currently run dst..src
  if (a == src) std::reverse(result.waypoints.begin(), result.waypoints.end());
  return result;
}

std::vector<double> SceneGraph::place_distances(const NodeId& from) const {
  std::vector<double> dist;
  std::vector<std::size_t> prev;
  dijkstra(place_slot(from), dist, prev);
  return dist;
}

NodeId SceneGraph::nearest_place(Vec2 position) const {
  // place_ids_ is sorted, so strict < keeps the lexicographically smallest id.
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t s = 0; s < place_ids_.size(); ++s) {
    const double d = squared_norm(node(place_ids_[s]).position - position);
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return place_ids_[best];
}

std::vector<InstanceDistance> SceneGraph::k_nearest_instances(std::string_view semantic_class,
                                                              const NodeId& from, std::size_t k,
                                                              DistanceMode mode) const {
  if (k == 0) throw ArgumentError("k_nearest_instances: k must be >= 1");
  const auto source = place_slot(from);
  std::vector<double> dist;
  if (mode == DistanceMode::geodesic) {
    std::vector<std::size_t> prev;
    dijkstra(source, dist, prev);
  }
  const Vec2 origin = node(from).position;

  std::vector<InstanceDistance> out;
  for (const auto& n : nodes_) {
    if (n.layer != Layer::object || n.semantic_class != semantic_class) continue;
    const double d = mode == DistanceMode::geodesic
                         ? dist[place_slot_.at(object_anchor_.at(n.id))]
                         : distance(origin, n.position);
    out.push_back({n.id, d});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.object < b.object;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

SceneGraph scene_graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("scene document must be a JSON object");
  std::string name = doc.value("name", std::string{});
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ParseError("scene document requires a 'nodes' array");
  }

  std::vector<SceneNode> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::unordered_map<NodeId, bool> has_pos;
  for (std::size_t i = 0; i < doc["nodes"].size(); ++i) {
    const auto& jn = doc["nodes"][i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (!jn.is_object() || !jn.contains("id")) throw ParseError(where + ": missing 'id'");
    SceneNode n;
    n.id = parse_id(jn["id"], where);
    if (!jn.contains("layer") || !jn["layer"].is_string()) {
      throw ParseError("node '" + n.id + "': missing 'layer'");
    }
    n.layer = parse_layer(jn["layer"].get<std::string>(), n.id);
    if (jn.contains("class")) {
      if (!jn["class"].is_string()) throw ParseError("node '" + n.id + "': 'class' must be a string");
      n.semantic_class = jn["class"].get<std::string>();
    }
    if (jn.contains("label")) {
      if (!jn["label"].is_string()) throw ParseError("node '" + n.id + "': 'label' must be a string");
      n.instance_label = jn["label"].get<std::string>();
    }
    bool pos = false;
    if (jn.contains("pos")) {
      const auto& p = jn["pos"];
      if (!p.is_array() || p.size() < 2 || p.size() > 3 || !p[0].is_number() || !p[1].is_number()) {
        throw ParseError("node '" + n.id + "': 'pos' must be [x, y] or [x, y, z]");
      }
      // z, when present, is dropped: everything lives on the floor plane.
      n.position = {p[0].get<double>(), p[1].get<double>()};
      pos = true;
    } else if (n.layer != Layer::room) {
      throw ParseError("node '" + n.id + "': missing 'pos'");
    }
    has_pos[n.id] = pos;
    nodes.push_back(std::move(n));
  }

  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("'edges' must be an array");
    for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
      const auto& je = doc["edges"][i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!je.is_array() || je.size() != 2) throw ParseError(where + ": expected [id, id]");
      edges.emplace_back(parse_id(je[0], where), parse_id(je[1], where));
    }
  }

  // Rooms without an explicit position get the centroid of their places
  // (or, failing that, of their objects).
  std::unordered_map<NodeId, const SceneNode*> by_id;
  for (const auto& n : nodes) by_id[n.id] = &n;
  for (auto& n : nodes) {
    if (n.layer != Layer::room || has_pos[n.id]) continue;
    Vec2 place_sum, object_sum;
    int places = 0, objects = 0;
    for (const auto& [a, b] : edges) {
      const NodeId* other = a == n.id ? &b : (b == n.id ? &a : nullptr);
      if (!other) continue;
      auto it = by_id.find(*other);
      if (it == by_id.end()) continue;
      if (it->second->layer == Layer::place) {
        place_sum = place_sum + it->second->position;
        ++places;
      } else if (it->second->layer == Layer::object) {
        object_sum = object_sum + it->second->position;
        ++objects;
      }
    }
    if (places > 0) {
      n.position = (1.0 / places) * place_sum;
    } else if (objects > 0) {
      n.position = (1.0 / objects) * object_sum;
    }
  }

  return SceneGraph(std::move(name), std::move(nodes), std::move(edges));
}

SceneGraph load_scene_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("scene file '" + path.string() + "': " + e.what());
  }
  return scene_graph_from_json(doc);
}

nlohmann::json to_json(const SceneGraph& graph) {
  nlohmann::json doc;
  doc["name"] = graph.name();
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& n : graph.nodes()) {
    nlohmann::json jn{{"id", n.id},
                      {"layer", std::string(to_string(n.layer))},
                      {"label", n.instance_label},
                      {"pos", {n.position.x, n.position.y}}};
    if (!n.semantic_class.empty()) jn["class"] = n.semantic_class;
    nodes.push_back(std::move(jn));
  }
  auto& edges = doc["edges"] = nlohmann::json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.a, e.b});
  return doc;
}

}  // namespace lp2::dsg
