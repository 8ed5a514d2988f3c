#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lp2/dsg/scene_graph.hpp"
#include "lp2/spatial/spatial.hpp"

namespace lp2::eval {

using spatial::DiscreteTrajectory;
using spatial::TrajectorySample;

inline constexpr double kVelocityFitWindow = 2.0;  // s

/// Least-squares velocity over the last 2 s of the past; samples in
/// absolute time. Fewer than two samples in the window falls back to the
/// last two; identical timestamps or positions give zero velocity.
Vec2 fit_velocity(std::span<const TrajectorySample> past);

/// Straight-line extrapolation from the last past position.
DiscreteTrajectory baseline_constant_velocity(std::span<const TrajectorySample> past,
                                              double horizon, double dt);

/// `steps` uniform neighbor choices on the place layer, starting at `from`.
/// A place without neighbors repeats itself.
std::vector<dsg::NodeId> random_place_walk(const dsg::SceneGraph& graph, const dsg::NodeId& from,
                                           std::size_t steps, std::uint64_t seed);

/// n random walks: straight to the nearest place, then uniform neighbor
/// hops at v_walk. Each trajectory weighs 1/n.
std::vector<DiscreteTrajectory> baseline_random_walk(const dsg::SceneGraph& graph, Vec2 start,
                                                     double horizon, double dt, std::size_t n,
                                                     std::uint64_t seed, double v_walk = 1.4);

/// n walks to a uniformly drawn place along the shortest path at v_walk,
/// then held at the goal. Each trajectory weighs 1/n.
std::vector<DiscreteTrajectory> baseline_random_goal(const dsg::SceneGraph& graph, Vec2 start,
                                                     double horizon, double dt, std::size_t n,
                                                     std::uint64_t seed, double v_walk = 1.4);

}  // namespace lp2::eval
