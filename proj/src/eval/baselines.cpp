#include "lp2/eval/baselines.hpp"

#include <random>

#include "lp2/error.hpp"

namespace lp2::eval {

using spatial::Knot;

Vec2 fit_velocity(std::span<const TrajectorySample> past) {
  if (past.size() < 2) throw ArgumentError("constant velocity needs at least two past samples");
  const double t_last = past.back().t;
  std::size_t first = past.size() - 1;
  while (first > 0 && past[first - 1].t >= t_last - kVelocityFitWindow - 1e-9) --first;
  if (past.size() - first < 2) first = past.size() - 2;

  const auto window = past.subspan(first);
  const double n = static_cast<double>(window.size());
  double mt = 0.0;
  Vec2 mp{0.0, 0.0};
  for (const auto& s : window) {
    mt += s.t;
    mp = mp + s.position;
  }
  mt /= n;
  mp = (1.0 / n) * mp;
  double stt = 0.0;
  Vec2 stp{0.0, 0.0};
  for (const auto& s : window) {
    stt += (s.t - mt) * (s.t - mt);
    stp = stp + (s.t - mt) * (s.position - mp);
  }
  if (!(stt > 0.0)) return {0.0, 0.0};
  return (1.0 / stt) * stp;
}

DiscreteTrajectory baseline_constant_velocity(std::span<const TrajectorySample> past,
                                              double horizon, double dt) {
  const auto v = fit_velocity(past);
  const auto last = past.back().position;
  DiscreteTrajectory out;
  out.samples = spatial::sample_knots({{0.0, last}, {horizon, last + horizon * v}}, dt, horizon);
  return out;
}

namespace {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng));
}

void walk_to(std::vector<Knot>& knots, Vec2 to, double v_walk) {
  const auto& last = knots.back();
  knots.push_back({last.t + distance(last.position, to) / v_walk, to});
}

void check(double horizon, double dt, std::size_t n, double v_walk) {
  if (!(dt > 0.0) || horizon < 0.0) throw ArgumentError("baseline: invalid dt or horizon");
  if (n == 0) throw ArgumentError("baseline: trajectory count must be >= 1");
  if (!(v_walk > 0.0)) throw ArgumentError("baseline: v_walk must be > 0");
}

}  // namespace

std::vector<dsg::NodeId> random_place_walk(const dsg::SceneGraph& graph, const dsg::NodeId& from,
                                           std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<dsg::NodeId> out{from};
  for (std::size_t i = 0; i < steps; ++i) {
    const auto nbrs = graph.place_neighbors(out.back());
    out.push_back(nbrs.empty() ? out.back() : nbrs[uniform_index(rng, nbrs.size())]);
  }
  return out;
}

std::vector<DiscreteTrajectory> baseline_random_walk(const dsg::SceneGraph& graph, Vec2 start,
                                                     double horizon, double dt, std::size_t n,
                                                     std::uint64_t seed, double v_walk) {
  check(horizon, dt, n, v_walk);
  std::mt19937_64 rng(seed);
  std::vector<DiscreteTrajectory> out;
  for (std::size_t r = 0; r < n; ++r) {
    auto place = graph.nearest_place(start);
    std::vector<Knot> knots{{0.0, start}};
    walk_to(knots, graph.node(place).position, v_walk);
    while (knots.back().t <= horizon) {
      const auto nbrs = graph.place_neighbors(place);
      if (nbrs.empty()) break;
      place = nbrs[uniform_index(rng, nbrs.size())];
      walk_to(knots, graph.node(place).position, v_walk);
    }
    DiscreteTrajectory traj;
    traj.samples = spatial::sample_knots(knots, dt, horizon);
    traj.weight = 1.0 / static_cast<double>(n);
    out.push_back(std::move(traj));
  }
  return out;
}

std::vector<DiscreteTrajectory> baseline_random_goal(const dsg::SceneGraph& graph, Vec2 start,
                                                     double horizon, double dt, std::size_t n,
                                                     std::uint64_t seed, double v_walk) {
  check(horizon, dt, n, v_walk);
  std::mt19937_64 rng(seed);
  const auto& places = graph.places();
  const auto from = graph.nearest_place(start);
  std::vector<DiscreteTrajectory> out;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& goal = places[uniform_index(rng, places.size())];
    std::vector<Knot> knots{{0.0, start}};
    for (const auto& wp : graph.shortest_path(from, goal).waypoints) {
      walk_to(knots, graph.node(wp).position, v_walk);
    }
    DiscreteTrajectory traj;
    traj.samples = spatial::sample_knots(knots, dt, horizon);
    traj.weight = 1.0 / static_cast<double>(n);
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace lp2::eval
