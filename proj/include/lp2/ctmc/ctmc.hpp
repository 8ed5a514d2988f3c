#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "lp2/tree/interaction_tree.hpp"

namespace lp2::ctmc {

/// Nonzero off-diagonal generator entry: rate of jumping from -> to.
struct Transition {
  std::size_t to = 0;
  double rate = 0.0;  // 1/s
};

/// Continuous-time Markov chain over the states of a grounded interaction
/// tree.
///
/// Column convention: the generator satisfies dP/dt = Q P, so Q(i, j) is the
/// rate of moving from state j to state i and every column sums to zero.
/// States are in breadth-first tree order (root first), which makes Q lower
/// triangular. Rates are stored sparsely, per source state.
class Ctmc {
 public:
  Ctmc(std::vector<std::size_t> tree_ids, std::vector<std::vector<Transition>> outgoing,
       double v_walk, bool no_interaction_times);

  std::size_t size() const { return tree_ids_.size(); }
  std::size_t initial() const { return 0; }
  double v_walk() const { return v_walk_; }
  bool no_interaction_times() const { return no_interaction_times_; }

  /// Tree node id backing each state.
  const std::vector<std::size_t>& tree_ids() const { return tree_ids_; }
  /// State index of a tree node, if it is a state.
  std::optional<std::size_t> state_of(std::size_t tree_id) const;

  const std::vector<Transition>& outgoing(std::size_t state) const { return outgoing_[state]; }
  double exit_rate(std::size_t state) const { return exit_rate_[state]; }
  bool absorbing(std::size_t state) const { return outgoing_[state].empty(); }
  double max_exit_rate() const { return max_exit_rate_; }

  /// Q(i, j), column convention.
  double q(std::size_t i, std::size_t j) const;
  /// Dense row-major copy of Q.
  std::vector<double> dense() const;
  /// y = Q x
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::vector<std::size_t> tree_ids_;
  std::vector<std::vector<Transition>> outgoing_;
  std::vector<double> exit_rate_;
  double max_exit_rate_ = 0.0;
  double v_walk_ = 1.4;
  bool no_interaction_times_ = false;
};

struct GeneratorOptions {
  double v_walk = 1.4;                // m/s
  bool no_interaction_times = false;  // collapse interaction dwell to zero
};

/// Rates: root/path node with outgoing segment d -> child c: v_walk / d,
/// scaled by c's branch probability at the root; interaction node with
/// duration tau -> child c: q_c / tau. Leaves are absorbing.
///
/// With no_interaction_times, non-leaf interaction nodes are eliminated and
/// their inflow is routed straight to their children by branch probability.
Ctmc build_generator(const tree::InteractionTree& tree, const GeneratorOptions& options = {});

struct StateDistribution {
  double t = 0.0;
  std::vector<double> p;
};

inline constexpr double kUniformizationTolerance = 1e-10;

/// exp(Q t) applied to the unit vector at the initial state, by
/// uniformization with Poisson truncation error below `tolerance`.
StateDistribution distribution_at(const Ctmc& chain, double t,
                                  double tolerance = kUniformizationTolerance);

/// exp(Q dt) p for an arbitrary starting distribution.
std::vector<double> evolve(const Ctmc& chain, std::span<const double> p, double dt,
                           double tolerance = kUniformizationTolerance);

/// Distributions at ascending times, stepping from one time to the next.
std::vector<StateDistribution> distributions_at(const Ctmc& chain, std::span<const double> times,
                                                double tolerance = kUniformizationTolerance);

/// Absorption distribution: mass on leaves, each leaf weighted by the
/// product of exit probabilities along its root path. Satisfies Q p = 0.
StateDistribution steady_state(const Ctmc& chain);

/// Half the L1 distance. Throws ArgumentError on dimension mismatch.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// Smallest t on the grid {0, dt, ..., t_max} with TV(P(t), steady) <
/// threshold, refined by bisection to within 0.05 s; nullopt if never
/// reached.
std::optional<double> horizon_of_meaning(const Ctmc& chain, double threshold, double t_max,
                                         double dt);

/// Debug dump: state order plus nonzero Q entries.
nlohmann::json to_json(const Ctmc& chain);

}  // namespace lp2::ctmc
