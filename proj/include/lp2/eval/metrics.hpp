#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lp2/spatial/spatial.hpp"

namespace lp2::eval {

using spatial::DiscreteTrajectory;
using spatial::TrajectorySample;

/// Half-open time window (begin, end], seconds after the split.
struct Window {
  double begin = 0.0;
  double end = 0.0;

  bool contains(double t) const { return t > begin + 1e-9 && t <= end + 1e-9; }
  std::string label() const;  // "0-10"
};

inline const std::vector<Window> kDefaultWindows{{0.0, 10.0}, {10.0, 30.0}, {30.0, 60.0}};

inline constexpr double kDensityFloor = 1e-12;
inline constexpr double kMinBandwidth = 0.2;  // m

using WindowValues = std::vector<std::optional<double>>;

struct NllCurve {
  std::vector<double> times;   // seconds after the split
  std::vector<double> values;  // -log max(p, floor)
  WindowValues windows;        // mean per window; absent if not covered
};

/// Evaluation timesteps dt, 2 dt, ..., up to horizon.
std::vector<double> eval_times(double dt, double horizon);

/// Weighted Silverman bandwidth for a 2D Gaussian KDE:
/// h = sigma_hat * n_eff^(-1/6), sigma_hat the root mean of the per-axis
/// variances, floored at kMinBandwidth.
double silverman_bandwidth(std::span<const Vec2> points, std::span<const double> weights);

/// Weighted isotropic Gaussian KDE; weights are normalized internally.
double kde_density(std::span<const Vec2> points, std::span<const double> weights, double h,
                   Vec2 xy);

/// NLL of `track` (relative times, starting at 0) under the CTMC mixture.
NllCurve nll_mixture(const spatial::SpatioTemporalDistribution& dist,
                     std::span<const TrajectorySample> track,
                     const std::vector<Window>& windows, double dt, double horizon);

/// NLL under a per-timestep KDE over the predicted trajectories, each
/// weighted by its `weight`.
NllCurve nll_samples(const std::vector<DiscreteTrajectory>& predictions,
                     std::span<const TrajectorySample> track, const std::vector<Window>& windows,
                     double dt, double horizon);

/// Best-of-n average displacement per window over the first n predictions.
/// A window is absent when the predictions or the track end before it does.
WindowValues bon_ade(const std::vector<DiscreteTrajectory>& predictions,
                     std::span<const TrajectorySample> track, std::size_t n,
                     const std::vector<Window>& windows, bool squared = false);

}  // namespace lp2::eval
