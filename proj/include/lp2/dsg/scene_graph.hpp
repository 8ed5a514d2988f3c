#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp2/geometry.hpp"

namespace lp2::dsg {

using NodeId = std::string;

enum class Layer { object, place, room };

std::string_view to_string(Layer layer);

struct SceneNode {
  NodeId id;
  Layer layer = Layer::place;
  std::string semantic_class;  // required for objects and rooms
  std::string instance_label;  // unique within the scene
  Vec2 position;               // room nodes carry their centroid
};

enum class EdgeKind { intra_layer, inter_layer };

struct SceneEdge {
  NodeId a;
  NodeId b;
  EdgeKind kind = EdgeKind::intra_layer;
};

struct PathResult {
  std::vector<NodeId> waypoints;  // place ids, from .. to
  double length = 0.0;            // meters
};

struct InstanceDistance {
  NodeId object;
  double distance = 0.0;
};

enum class DistanceMode { geodesic, euclidean };

/// Immutable three-layer scene graph (objects, places, rooms).
///
/// Nodes are stored sorted by id; every query is read-only, so a loaded
/// graph can be shared across threads without synchronization.
class SceneGraph {
 public:
  /// Validates and indexes the given nodes and edges. Throws ParseError for
  /// dangling or malformed edges and ValidationError for invariant
  /// violations (disconnected places, objects without a room, ...).
  SceneGraph(std::string name, std::vector<SceneNode> nodes,
             std::vector<std::pair<NodeId, NodeId>> edges);

  const std::string& name() const { return name_; }
  const std::vector<SceneNode>& nodes() const { return nodes_; }
  const std::vector<SceneEdge>& edges() const { return edges_; }

  const SceneNode& node(const NodeId& id) const;
  const SceneNode* find(const NodeId& id) const;
  bool contains(const NodeId& id) const { return find(id) != nullptr; }

  /// Looks up an object by id first, then by instance label.
  const SceneNode* resolve_object(std::string_view ref) const;

  std::vector<const SceneNode*> nodes_in_layer(Layer layer) const;

  /// Rooms directly connected to `room` by room-room edges, sorted by id.
  std::vector<NodeId> room_neighbors(const NodeId& room) const;
  /// The room an object belongs to.
  const NodeId& room_of(const NodeId& object) const;
  /// Place an object is anchored to (nearest place, computed at load).
  const NodeId& anchor_place(const NodeId& object) const;

  PathResult shortest_path(const NodeId& from, const NodeId& to) const;
  NodeId nearest_place(Vec2 position) const;
  std::vector<InstanceDistance> k_nearest_instances(
      std::string_view semantic_class, const NodeId& from, std::size_t k,
      DistanceMode mode = DistanceMode::geodesic) const;

  /// Geodesic distances from `from` to every place, indexed like places().
  std::vector<double> place_distances(const NodeId& from) const;
  /// Place node ids in sorted order.
  const std::vector<NodeId>& places() const { return place_ids_; }
  /// Neighbors of a place over the place layer, sorted by id.
  std::vector<NodeId> place_neighbors(const NodeId& place) const;

 private:
  std::size_t index_of(const NodeId& id) const;
  std::size_t place_slot(const NodeId& id) const;
  void dijkstra(std::size_t source, std::vector<double>& dist,
                std::vector<std::size_t>& prev) const;

  std::string name_;
  std::vector<SceneNode> nodes_;
  std::vector<SceneEdge> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> label_index_;

  std::vector<NodeId> place_ids_;
  std::unordered_map<NodeId, std::size_t> place_slot_;
  // Place adjacency: slot -> (neighbor slot, edge length), sorted by slot.
  std::vector<std::vector<std::pair<std::size_t, double>>> place_adj_;

  std::unordered_map<NodeId, NodeId> object_room_;
  std::unordered_map<NodeId, NodeId> object_anchor_;
  std::unordered_map<NodeId, std::vector<NodeId>> room_adj_;
};

SceneGraph scene_graph_from_json(const nlohmann::json& doc);
SceneGraph load_scene_graph(const std::filesystem::path& path);
nlohmann::json to_json(const SceneGraph& graph);

}  // namespace lp2::dsg
