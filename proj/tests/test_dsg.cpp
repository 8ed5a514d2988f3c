#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/dsg/scene_text.hpp"
#include "lp2/error.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace lp2;
using namespace lp2::dsg;
using lp2::testing::ObjectSpec;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(R"({
    "name": "minimal",
    "nodes": [
      {"id": "r1", "layer": "room", "class": "kitchen", "label": "kitchen", "pos": [0, 0]},
      {"id": "p1", "layer": "place", "label": "p1", "pos": [0, 0]},
      {"id": "o1", "layer": "object", "class": "sink", "label": "sink_1", "pos": [0.5, 0]}
    ],
    "edges": [["r1", "p1"], ["o1", "r1"]]
  })");
}

json office_doc() {
  json doc{{"name", "office"}, {"nodes", json::array()}, {"edges", json::array()}};
  const int rooms = 13;
  for (int r = 0; r < rooms; ++r) {
    const std::string room = "r" + std::to_string(r);
    doc["nodes"].push_back({{"id", room}, {"layer", "room"}, {"class", "office"},
                            {"label", "office " + std::to_string(r)}});
    for (int k = 0; k < 2; ++k) {
      const std::string place = "p" + std::to_string(r) + "_" + std::to_string(k);
      doc["nodes"].push_back({{"id", place}, {"layer", "place"}, {"label", place},
                              {"pos", {r * 4.0 + k * 2.0, 0.0, 0.3}}});
      doc["edges"].push_back({room, place});
      if (k == 1) doc["edges"].push_back({"p" + std::to_string(r) + "_0", place});
    }
    if (r > 0) {
      doc["edges"].push_back({"p" + std::to_string(r - 1) + "_1", "p" + std::to_string(r) + "_0"});
      doc["edges"].push_back({"r" + std::to_string(r - 1), room});
    }
  }
  for (int o = 0; o < 107; ++o) {
    const int r = o % rooms;
    const std::string id = "o" + std::to_string(o);
    doc["nodes"].push_back({{"id", id}, {"layer", "object"}, {"class", o % 2 ? "chair" : "desk"},
                            {"label", "obj_" + std::to_string(o)}, {"pos", {r * 4.0 + 1.0, 0.5, 1.2}}});
    doc["edges"].push_back({id, "r" + std::to_string(r)});
  }
  return doc;
}

double waypoint_length(const SceneGraph& g, const PathResult& p) {
  double sum = 0.0;
  for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
    sum += distance(g.node(p.waypoints[i - 1]).position, g.node(p.waypoints[i]).position);
  }
  return sum;
}

}  // namespace

TEST_CASE("load: minimal scene has three nodes") {
  const auto g = scene_graph_from_json(minimal_doc());
  CHECK(g.nodes().size() == 3);
  CHECK(g.room_of("o1") == "r1");
  CHECK(g.anchor_place("o1") == "p1");
}

TEST_CASE("load: disconnected places layer is rejected") {
  auto doc = minimal_doc();
  doc["nodes"].push_back({{"id", "p2"}, {"layer", "place"}, {"label", "p2"}, {"pos", {5, 0}}});
  doc["edges"].push_back({"r1", "p2"});
  try {
    scene_graph_from_json(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2 components") != std::string::npos);
    CHECK(msg.find("p2") != std::string::npos);
  }
}

TEST_CASE("load: schema violations name the offender") {
  auto doc = minimal_doc();
  doc["edges"].push_back({"o1", "ghost"});
  try {
    scene_graph_from_json(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
  auto bad_layer = minimal_doc();
  bad_layer["nodes"][1]["layer"] = "floor";
  CHECK_THROWS_AS(scene_graph_from_json(bad_layer), ParseError);
  auto no_room = minimal_doc();
  no_room["edges"].erase(1);
  CHECK_THROWS_AS(scene_graph_from_json(no_room), ValidationError);
}

TEST_CASE("load: office-scale scene with 13 rooms and 107 objects") {
  const auto g = scene_graph_from_json(office_doc());
  CHECK(g.nodes_in_layer(Layer::room).size() == 13);
  CHECK(g.nodes_in_layer(Layer::object).size() == 107);
  // z is dropped
  CHECK(g.node("p3_1").position == Vec2{14.0, 0.0});
}

TEST_CASE("load: JSON round trip preserves the graph") {
  const auto g = scene_graph_from_json(office_doc());
  const auto again = scene_graph_from_json(to_json(g));
  CHECK(to_json(again) == to_json(g));
  CHECK(describe_scene(again, Granularity::instance) == describe_scene(g, Granularity::instance));
}

TEST_CASE("shortest_path: trivial cases") {
  const auto g = lp2::testing::line_scene({0.0, 1.0, 2.0});
  const auto self = g.shortest_path("p1", "p1");
  CHECK(self.length == 0.0);
  CHECK(self.waypoints == std::vector<NodeId>{"p1"});
  const auto line = g.shortest_path("p0", "p2");
  CHECK(line.length == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(line.waypoints == std::vector<NodeId>{"p0", "p1", "p2"});
  CHECK_THROWS_AS(g.shortest_path("p0", "r0"), ArgumentError);
  CHECK_THROWS_AS(g.shortest_path("nope", "p0"), ArgumentError);
}

TEST_CASE("shortest_path: exact against Floyd-Warshall on lattice graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = lp2::testing::random_lattice_scene(rng, 50, 0, {"x"});
    const auto fw = lp2::testing::floyd_warshall(g);
    const auto& places = g.places();
    for (std::size_t i = 0; i < places.size(); ++i) {
      const auto dist = g.place_distances(places[i]);
      for (std::size_t j = 0; j < places.size(); ++j) {
        const auto p = g.shortest_path(places[i], places[j]);
        REQUIRE(p.length == fw.dist[i][j]);
        REQUIRE(dist[j] == fw.dist[i][j]);
        REQUIRE(p.waypoints.front() == places[i]);
        REQUIRE(p.waypoints.back() == places[j]);
        REQUIRE(waypoint_length(g, p) == doctest::Approx(p.length).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("shortest_path: real coordinates match the oracle path") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = lp2::testing::random_real_scene(rng, 50);
    const auto fw = lp2::testing::floyd_warshall(g);
    const auto& places = g.places();
    for (std::size_t i = 0; i < places.size(); ++i) {
      for (std::size_t j = 0; j < places.size(); ++j) {
        const auto p = g.shortest_path(places[i], places[j]);
        REQUIRE(p.length == doctest::Approx(fw.dist[i][j]).epsilon(1e-12));
        std::vector<NodeId> expected{places[i]};
        for (auto k = i; k != j;) {
          k = fw.next[k][j];
          expected.push_back(places[k]);
        }
        REQUIRE(p.waypoints == expected);
      }
    }
  }
}

TEST_CASE("shortest_path: symmetry and triangle inequality") {
  std::mt19937_64 rng(3);
  const auto g = lp2::testing::random_real_scene(rng, 30);
  const auto& places = g.places();
  for (const auto& a : places) {
    for (const auto& b : places) {
      const double ab = g.shortest_path(a, b).length;
      CHECK(ab == doctest::Approx(g.shortest_path(b, a).length).epsilon(1e-12));
      for (const auto& c : places) {
        REQUIRE(g.shortest_path(a, c).length <= ab + g.shortest_path(b, c).length + 1e-9);
      }
    }
  }
}

TEST_CASE("nearest_place: exact hit and tie-break") {
  const auto g = lp2::testing::line_scene({0.0, 2.0, 4.0});
  CHECK(g.nearest_place({2.0, 0.0}) == "p1");
  CHECK(g.nearest_place({1.0, 0.0}) == "p0");
  CHECK(g.nearest_place({3.0, 5.0}) == "p1");
}

TEST_CASE("nearest_place: linear-scan oracle") {
  std::mt19937_64 rng(5);
  const auto g = lp2::testing::random_real_scene(rng, 100);
  std::uniform_real_distribution<double> coord(-5.0, 35.0);
  for (int q = 0; q < 200; ++q) {
    const Vec2 x{coord(rng), coord(rng)};
    NodeId best;
    double best_d = 1e300;
    for (const auto& p : g.places()) {
      const double d = distance(g.node(p).position, x);
      if (d < best_d || (d == best_d && p < best)) {
        best_d = d;
        best = p;
      }
    }
    REQUIRE(g.nearest_place(x) == best);
  }
}

TEST_CASE("k_nearest_instances: small cases") {
  const auto g = lp2::testing::line_scene(
      {0.0, 1.0, 2.0, 3.0, 4.0},
      {{"o1", "sink", "sink_1", {0.0, 0.2}},
       {"c1", "chair", "chair_1", {4.0, 0.1}},
       {"c2", "chair", "chair_2", {1.0, 0.1}},
       {"c3", "chair", "chair_3", {3.0, 0.1}},
       {"c4", "chair", "chair_4", {2.0, 0.1}}});
  const auto sinks = g.k_nearest_instances("sink", "p2", 3);
  REQUIRE(sinks.size() == 1);
  CHECK(sinks[0].object == "o1");
  CHECK(sinks[0].distance == doctest::Approx(2.0));

  const auto chairs = g.k_nearest_instances("chair", "p0", 3);
  REQUIRE(chairs.size() == 3);
  CHECK(chairs[0].object == "c2");
  CHECK(chairs[1].object == "c4");
  CHECK(chairs[2].object == "c3");
  CHECK(g.k_nearest_instances("piano", "p0", 3).empty());
  CHECK_THROWS_AS(g.k_nearest_instances("chair", "p0", 0), ArgumentError);

  // equidistant chairs are ordered by id
  const auto tie = g.k_nearest_instances("chair", "p2", 4);
  REQUIRE(tie.size() == 4);
  CHECK(tie[0].object == "c4");
  CHECK(tie[1].object == "c2");
  CHECK(tie[2].object == "c3");
  CHECK(tie[3].object == "c1");
}

TEST_CASE("k_nearest_instances: brute-force geodesic ranking") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> classes{"chair", "cup", "lamp"};
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = lp2::testing::random_lattice_scene(rng, 40, 30, classes);
    const auto fw = lp2::testing::floyd_warshall(g);
    const auto& places = g.places();
    for (std::size_t i = 0; i < places.size(); i += 7) {
      for (const auto& cls : classes) {
        std::vector<std::pair<double, NodeId>> all;
        for (const auto* o : g.nodes_in_layer(Layer::object)) {
          if (o->semantic_class != cls) continue;
          const auto anchor = g.anchor_place(o->id);
          const auto j = static_cast<std::size_t>(
              std::find(places.begin(), places.end(), anchor) - places.begin());
          all.emplace_back(fw.dist[i][j], o->id);
        }
        std::sort(all.begin(), all.end());
        const auto got = g.k_nearest_instances(cls, places[i], 3);
        REQUIRE(got.size() == std::min<std::size_t>(3, all.size()));
        for (std::size_t k = 0; k < got.size(); ++k) {
          REQUIRE(got[k].object == all[k].second);
          REQUIRE(got[k].distance == all[k].first);
        }
      }
    }
  }
}

TEST_CASE("k_nearest_instances: euclidean mode") {
  const auto g = lp2::testing::make_scene(
      {{"a", {0, 0}}, {"b", {0, 10}}, {"c", {1, 10}}, {"d", {1, 0}}},
      {{"a", "b"}, {"b", "c"}, {"c", "d"}},
      {{"x1", "cup", "cup_1", {1, 0}}, {"x2", "cup", "cup_2", {0, 10}}});
  CHECK(g.k_nearest_instances("cup", "a", 1)[0].object == "x2");
  const auto e = g.k_nearest_instances("cup", "a", 1, DistanceMode::euclidean);
  CHECK(e[0].object == "x1");
  CHECK(e[0].distance == doctest::Approx(1.0));
}

TEST_CASE("describe_scene: single room, single object") {
  const auto g = scene_graph_from_json(minimal_doc());
  CHECK(describe_scene(g, Granularity::semantic) ==
        "In the environment, there are the rooms: kitchen.\n"
        "room connections: none.\n"
        "These objects are in the environment:\n"
        "In the kitchen, there is 1 sink.\n");
  CHECK(describe_scene(g, Granularity::instance) ==
        "In the environment, there are the rooms: kitchen.\n"
        "room connections: none.\n"
        "These objects are in the environment:\n"
        "In the kitchen, there is sink_1 (sink).\n");
}

TEST_CASE("describe_scene: room connections appear once") {
  auto doc = minimal_doc();
  doc["nodes"].push_back({{"id", "r2"}, {"layer", "room"}, {"class", "hall"}, {"label", "hall"}});
  doc["nodes"].push_back({{"id", "p2"}, {"layer", "place"}, {"label", "p2"}, {"pos", {2, 0}}});
  doc["edges"].push_back({"r1", "r2"});
  doc["edges"].push_back({"r2", "r1"});
  doc["edges"].push_back({"p1", "p2"});
  doc["edges"].push_back({"r2", "p2"});
  const auto text = describe_scene(scene_graph_from_json(doc), Granularity::semantic);
  CHECK(text.find("room connections: kitchen - hall.\n") != std::string::npos);
  CHECK(text.find("hall - kitchen") == std::string::npos);
}

TEST_CASE("describe_scene: one mention per (room, class) pair") {
  const auto g = load_scene_graph(LP2_TEST_DATA "/home_scene.json");
  std::set<std::pair<NodeId, std::string>> pairs;
  for (const auto* o : g.nodes_in_layer(Layer::object)) pairs.emplace(g.room_of(o->id), o->semantic_class);
  const auto text = describe_scene(g, Granularity::semantic);
  std::size_t mentions = 0;
  const auto objects_at = text.find("These objects are in the environment:");
  REQUIRE(objects_at != std::string::npos);
  for (auto pos = objects_at; (pos = text.find("In the ", pos)) != std::string::npos; ++pos) ++mentions;
  CHECK(mentions == pairs.size());
  for (const auto* r : g.nodes_in_layer(Layer::room)) {
    const auto& label = r->instance_label;
    const auto first = text.find(label);
    CHECK(first != std::string::npos);
  }

  const auto inst = describe_scene(g, Granularity::instance);
  for (const auto* o : g.nodes_in_layer(Layer::object)) {
    const auto needle = "there is " + o->instance_label + " (";
    const auto at = inst.find(needle);
    REQUIRE(at != std::string::npos);
    CHECK(inst.find(needle, at + 1) == std::string::npos);
  }
}

TEST_CASE("describe_scene: deterministic") {
  const auto a = load_scene_graph(LP2_TEST_DATA "/home_scene.json");
  const auto b = load_scene_graph(LP2_TEST_DATA "/home_scene.json");
  for (auto gran : {Granularity::semantic, Granularity::instance}) {
    CHECK(describe_scene(a, gran) == describe_scene(b, gran));
    CHECK(describe_scene(a, gran) == describe_scene(a, gran));
  }
}
