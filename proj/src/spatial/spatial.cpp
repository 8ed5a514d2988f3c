#include "lp2/spatial/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lp2/error.hpp"

namespace lp2::spatial {

using tree::NodeKind;

double mixture_density(std::span<const double> weights, std::span<const Vec2> means, double sigma,
                       Vec2 xy) {
  const double var = sigma * sigma;
  const double norm = 1.0 / (2.0 * std::numbers::pi * var);
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    sum += weights[i] * std::exp(-0.5 * squared_norm(xy - means[i]) / var);
  }
  return norm * sum;
}

SpatioTemporalDistribution::SpatioTemporalDistribution(ctmc::Ctmc chain, std::vector<Vec2> positions,
                                                       double sigma)
    : chain_(std::move(chain)), positions_(std::move(positions)), sigma_(sigma) {
  if (!(sigma_ > 0.0)) throw ArgumentError("kernel width sigma must be > 0");
  if (positions_.size() != chain_.size()) {
    throw ArgumentError("one position per CTMC state required");
  }
  for (const auto& p : positions_) {
    if (!is_finite(p)) throw ArgumentError("state positions must be finite");
  }
}

SpatioTemporalDistribution SpatioTemporalDistribution::from_tree(const tree::InteractionTree& tree,
                                                                 ctmc::Ctmc chain, double sigma) {
  std::vector<Vec2> positions;
  positions.reserve(chain.size());
  for (auto id : chain.tree_ids()) positions.push_back(tree.node(id).position);
  return SpatioTemporalDistribution(std::move(chain), std::move(positions), sigma);
}

std::vector<double> SpatioTemporalDistribution::weights_at(double t) const {
  return ctmc::distribution_at(chain_, t).p;
}

double SpatioTemporalDistribution::density(Vec2 xy, double t) const {
  if (t < 0.0) throw ArgumentError("density: t must be >= 0");
  return mixture_density(weights_at(t), positions_, sigma_, xy);
}

namespace {

}  // namespace

std::vector<TrajectorySample> sample_knots(const std::vector<Knot>& knots, double dt,
                                           double horizon) {
  if (!(dt > 0.0)) throw ArgumentError("trajectory dt must be > 0");
  if (horizon < 0.0) throw ArgumentError("trajectory horizon must be >= 0");
  const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  std::vector<TrajectorySample> out;
  out.reserve(steps + 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (seg + 1 < knots.size() && knots[seg + 1].t <= t) ++seg;
    Vec2 p = knots[seg].position;
    if (seg + 1 < knots.size()) {
      const auto& a = knots[seg];
      const auto& b = knots[seg + 1];
      const double span = b.t - a.t;
      if (span > 0.0) p = lerp(a.position, b.position, (t - a.t) / span);
    }
    out.push_back({t, p});
  }
  return out;
}

std::optional<Vec2> position_at(std::span<const TrajectorySample> samples, double t) {
  constexpr double kSlack = 1e-9;
  if (samples.empty() || t < samples.front().t - kSlack || t > samples.back().t + kSlack) {
    return std::nullopt;
  }
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TrajectorySample& s, double v) { return s.t < v; });
  if (it == samples.end()) return samples.back().position;
  if (it == samples.begin() || it->t == t) return it->position;
  const auto& b = *it;
  const auto& a = *(it - 1);
  return lerp(a.position, b.position, (t - a.t) / (b.t - a.t));
}

namespace {

std::vector<std::size_t> root_path(const tree::InteractionTree& tree, std::size_t leaf) {
  std::vector<std::size_t> path;
  for (auto cur = std::optional<std::size_t>(leaf); cur; cur = tree.node(*cur).parent) {
    path.push_back(*cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Portable uniform in [0, 1) from a 64-bit engine.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

DiscreteTrajectory walk_sequence(const tree::InteractionTree& tree, const tree::Sequence& sequence,
                                 const WalkParams& params) {
  if (!(params.v_walk > 0.0)) throw ArgumentError("walk_sequence: v_walk must be > 0");
  const std::size_t leaf = sequence.interactions.empty() ? tree.root : sequence.interactions.back();
  const auto path = root_path(tree, leaf);

  std::vector<Knot> knots{{0.0, tree.node(path.front()).position}};
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& u = tree.node(path[i]);
    const auto& w = tree.node(path[i + 1]);
    if (u.kind == NodeKind::interaction) {
      if (!params.no_interaction_times) t += u.duration_s;
      knots.push_back({t, u.position});
      knots.push_back({t, w.position});
    } else {
      t += u.segment_length / params.v_walk;
      knots.push_back({t, w.position});
    }
  }
  DiscreteTrajectory out;
  out.samples = sample_knots(knots, params.dt, params.horizon);
  out.weight = sequence.probability;
  out.interactions = sequence.interactions;
  return out;
}

std::vector<DiscreteTrajectory> deterministic_walk_distribution(const tree::InteractionTree& tree,
                                                                std::size_t n,
                                                                const WalkParams& params) {
  if (n == 0) throw ArgumentError("trajectory count must be >= 1");
  const auto sequences = tree::enumerate_sequences(tree);
  std::vector<DiscreteTrajectory> out;
  for (std::size_t i = 0; i < sequences.size() && i < n; ++i) {
    out.push_back(walk_sequence(tree, sequences[i], params));
  }
  return out;
}

std::vector<DiscreteTrajectory> top_n_trajectories(const tree::InteractionTree& tree,
                                                   const ctmc::Ctmc& chain, std::size_t n,
                                                   double dt, TrajectoryMode mode, double horizon,
                                                   std::uint64_t seed) {
  if (n == 0) throw ArgumentError("trajectory count must be >= 1");
  const WalkParams params{dt, horizon, chain.v_walk(), chain.no_interaction_times()};
  if (mode == TrajectoryMode::expected) return deterministic_walk_distribution(tree, n, params);

  std::mt19937_64 rng(seed);
  std::vector<DiscreteTrajectory> out;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t s = chain.initial();
    double t = 0.0;
    std::vector<Knot> knots{{0.0, tree.node(chain.tree_ids()[s]).position}};
    while (!chain.absorbing(s) && t <= horizon) {
      const double sojourn = -std::log1p(-uniform01(rng)) / chain.exit_rate(s);
      double pick = uniform01(rng) * chain.exit_rate(s);
      const auto& outs = chain.outgoing(s);
      std::size_t next = outs.back().to;
      for (const auto& tr : outs) {
        if (pick < tr.rate) {
          next = tr.to;
          break;
        }
        pick -= tr.rate;
      }
      const auto& u = tree.node(chain.tree_ids()[s]);
      const auto& w = tree.node(chain.tree_ids()[next]);
      t += sojourn;
      if (u.kind == NodeKind::interaction) knots.push_back({t, u.position});
      knots.push_back({t, w.position});
      s = next;
    }
    DiscreteTrajectory traj;
    traj.samples = sample_knots(knots, dt, horizon);
    const auto leaf = chain.tree_ids()[s];
    double weight = 1.0;
    for (auto id : root_path(tree, leaf)) {
      const auto& node = tree.node(id);
      if (node.kind != NodeKind::interaction) continue;
      weight *= node.branch_probability;
      traj.interactions.push_back(id);
    }
    traj.weight = weight;
    out.push_back(std::move(traj));
  }
  return out;
}

GridSpec default_grid(const SpatioTemporalDistribution& dist, double margin, double resolution,
                      std::vector<double> times) {
  GridSpec g;
  g.x_min = g.y_min = std::numeric_limits<double>::infinity();
  g.x_max = g.y_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : dist.positions()) {
    g.x_min = std::min(g.x_min, p.x);
    g.x_max = std::max(g.x_max, p.x);
    g.y_min = std::min(g.y_min, p.y);
    g.y_max = std::max(g.y_max, p.y);
  }
  g.x_min -= margin;
  g.y_min -= margin;
  g.x_max += margin;
  g.y_max += margin;
  g.resolution = resolution;
  g.times = std::move(times);
  return g;
}

void write_density_grid(std::ostream& out, const SpatioTemporalDistribution& dist,
                        const GridSpec& grid, const std::string& manifest_hash) {
  if (!(grid.resolution > 0.0)) throw ArgumentError("grid resolution must be > 0");
  if (!manifest_hash.empty()) out << "# manifest " << manifest_hash << '\n';
  out << "x,y,t,density\n";
  const auto nx = static_cast<std::size_t>(std::floor((grid.x_max - grid.x_min) / grid.resolution + 1e-9)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor((grid.y_max - grid.y_min) / grid.resolution + 1e-9)) + 1;
  auto times = grid.times;
  std::sort(times.begin(), times.end());
  const auto snapshots = ctmc::distributions_at(dist.chain(), times);
  char line[160];
  for (const auto& snap : snapshots) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double y = grid.y_min + static_cast<double>(iy) * grid.resolution;
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = grid.x_min + static_cast<double>(ix) * grid.resolution;
        const double d = mixture_density(snap.p, dist.positions(), dist.sigma(), {x, y});
        std::snprintf(line, sizeof line, "%.4f,%.4f,%.3f,%.9e\n", x, y, snap.t, d);
        out << line;
      }
    }
  }
}

void write_trajectories(std::ostream& out, const std::vector<DiscreteTrajectory>& trajectories,
                        const std::string& manifest_hash) {
  if (!manifest_hash.empty()) out << "# manifest " << manifest_hash << '\n';
  out << "rank,weight,t,x,y\n";
  char line[160];
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    for (const auto& s : trajectories[r].samples) {
      std::snprintf(line, sizeof line, "%zu,%.9g,%.3f,%.4f,%.4f\n", r + 1, trajectories[r].weight,
                    s.t, s.position.x, s.position.y);
      out << line;
    }
  }
}

}  // namespace lp2::spatial
