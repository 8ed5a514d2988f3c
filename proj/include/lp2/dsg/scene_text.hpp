#pragma once

#include <string>
#include <string_view>

#include "lp2/dsg/scene_graph.hpp"

namespace lp2::dsg {

enum class Granularity { semantic, instance };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view s);

/// Version tag of the scene-text templates below. Predictor fixtures are
/// keyed on it, so any wording change must bump it.
inline constexpr std::string_view kSceneTextVersion = "v1";

/// Hierarchical natural-language description of the scene:
///
///   In the environment, there are the rooms: <r1>, <r2>.
///   room connections: <r1> - <r2>.
///   These objects are in the environment:
///   In the <room>, there are <n> <class>s.        (semantic)
///   In the <room>, there is <label> (<class>).    (instance)
///
/// One sentence per line. Rooms are named by instance label and listed by
/// id; semantic sentences are ordered by class name, instance sentences by
/// object id. The output is a pure function of the graph.
std::string describe_scene(const SceneGraph& graph, Granularity granularity);

}  // namespace lp2::dsg
