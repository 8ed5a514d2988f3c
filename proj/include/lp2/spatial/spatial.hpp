#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lp2/ctmc/ctmc.hpp"
#include "lp2/geometry.hpp"
#include "lp2/tree/interaction_tree.hpp"

namespace lp2::spatial {

/// Isotropic 2D Gaussian mixture sum_i w_i N(xy; mu_i, sigma^2 I), in 1/m^2.
double mixture_density(std::span<const double> weights, std::span<const Vec2> means, double sigma,
                       Vec2 xy);

/// CTMC state distribution lifted to the plane: a Gaussian of width sigma
/// at every state position, weighted by P(x(t)).
class SpatioTemporalDistribution {
 public:
  SpatioTemporalDistribution(ctmc::Ctmc chain, std::vector<Vec2> positions, double sigma);

  /// Positions are taken from the tree nodes backing each state.
  static SpatioTemporalDistribution from_tree(const tree::InteractionTree& tree, ctmc::Ctmc chain,
                                              double sigma);

  const ctmc::Ctmc& chain() const { return chain_; }
  const std::vector<Vec2>& positions() const { return positions_; }
  double sigma() const { return sigma_; }

  /// Mixture weights at time t (identical to distribution_at).
  std::vector<double> weights_at(double t) const;
  double density(Vec2 xy, double t) const;

 private:
  ctmc::Ctmc chain_;
  std::vector<Vec2> positions_;
  double sigma_;
};

struct TrajectorySample {
  double t = 0.0;
  Vec2 position;
};

struct DiscreteTrajectory {
  std::vector<TrajectorySample> samples;  // t = 0, dt, 2 dt, ...
  double weight = 1.0;                    // probability of the interaction sequence
  std::vector<std::size_t> interactions;  // tree ids of the sequence

  Vec2 at(std::size_t k) const { return samples.at(k).position; }
};

/// Piecewise-linear motion: position at `t` interpolates between knots.
struct Knot {
  double t = 0.0;
  Vec2 position;
};

/// Samples knot motion at t = 0, dt, ..., horizon. Before the first knot and
/// after the last one the position is held.
std::vector<TrajectorySample> sample_knots(const std::vector<Knot>& knots, double dt,
                                           double horizon);

/// Linear interpolation on time-sorted samples; nullopt outside their span.
std::optional<Vec2> position_at(std::span<const TrajectorySample> samples, double t);

enum class TrajectoryMode { expected, sampled };

struct WalkParams {
  double dt = 1.0;        // s
  double horizon = 60.0;  // s
  double v_walk = 1.4;    // m/s
  bool no_interaction_times = false;
};

/// Deterministic walk along one root-to-leaf sequence: traverse root/path
/// segments at v_walk, dwell exactly tau at each interaction, then hold the
/// final position. Sampled every dt on [0, horizon].
DiscreteTrajectory walk_sequence(const tree::InteractionTree& tree, const tree::Sequence& sequence,
                                 const WalkParams& params);

/// expected: the n most probable leaf sequences, walked deterministically.
/// sampled: n CTMC realizations (exponential sojourns, seeded).
std::vector<DiscreteTrajectory> top_n_trajectories(const tree::InteractionTree& tree,
                                                   const ctmc::Ctmc& chain, std::size_t n,
                                                   double dt, TrajectoryMode mode, double horizon,
                                                   std::uint64_t seed = 0);

/// Ablation without the CTMC: the n most probable sequences walked
/// deterministically (same code path as expected mode).
std::vector<DiscreteTrajectory> deterministic_walk_distribution(const tree::InteractionTree& tree,
                                                                std::size_t n,
                                                                const WalkParams& params);

struct GridSpec {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double resolution = 0.25;  // m
  std::vector<double> times;
};

/// Bounding box of the state positions padded by `margin`.
GridSpec default_grid(const SpatioTemporalDistribution& dist, double margin, double resolution,
                      std::vector<double> times);

/// CSV "x,y,t,density", one block per time, row-major (y outer, x inner).
/// A leading "# manifest <hash>" comment line is written when a hash is
/// given.
void write_density_grid(std::ostream& out, const SpatioTemporalDistribution& dist,
                        const GridSpec& grid, const std::string& manifest_hash = {});

/// CSV "rank,weight,t,x,y".
void write_trajectories(std::ostream& out, const std::vector<DiscreteTrajectory>& trajectories,
                        const std::string& manifest_hash = {});

}  // namespace lp2::spatial
