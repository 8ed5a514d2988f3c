#include "lp2/dsg/scene_text.hpp"

#include <map>
#include <sstream>

#include "lp2/error.hpp"

namespace lp2::dsg {

std::string_view to_string(Granularity g) {
  return g == Granularity::semantic ? "semantic" : "instance";
}

Granularity parse_granularity(std::string_view s) {
  if (s == "semantic") return Granularity::semantic;
  if (s == "instance") return Granularity::instance;
  throw ArgumentError("unknown granularity '" + std::string(s) + "'");
}

std::string describe_scene(const SceneGraph& graph, Granularity granularity) {
  const auto rooms = graph.nodes_in_layer(Layer::room);
  std::ostringstream out;

  out << "In the environment, there are the rooms: ";
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    out << (i ? ", " : "") << rooms[i]->instance_label;
  }
  out << ".\n";

  out << "room connections: ";
  bool any = false;
  for (const auto* room : rooms) {
    for (const auto& other : graph.room_neighbors(room->id)) {
      if (other <= room->id) continue;  // each undirected pair once
      out << (any ? ", " : "") << room->instance_label << " - "
          << graph.node(other).instance_label;
      any = true;
    }
  }
  out << (any ? ".\n" : "none.\n");

  out << "These objects are in the environment:\n";
  const auto objects = graph.nodes_in_layer(Layer::object);
  for (const auto* room : rooms) {
    if (granularity == Granularity::semantic) {
      std::map<std::string, int> counts;
      for (const auto* o : objects) {
        if (graph.room_of(o->id) == room->id) ++counts[o->semantic_class];
      }
      for (const auto& [cls, n] : counts) {
        out << "In the " << room->instance_label << ", ";
        if (n == 1) {
          out << "there is 1 " << cls << ".\n";
        } else {
          out << "there are " << n << " " << cls << "s.\n";
        }
      }
    } else {
      for (const auto* o : objects) {
        if (graph.room_of(o->id) != room->id) continue;
        out << "In the " << room->instance_label << ", there is " << o->instance_label << " ("
            << o->semantic_class << ").\n";
      }
    }
  }
  return out.str();
}

}  // namespace lp2::dsg
