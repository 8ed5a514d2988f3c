#include "lp2/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lp2/ctmc/ctmc.hpp"
#include "lp2/error.hpp"

namespace lp2::eval {

namespace {

std::string trim_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool covers(std::span<const TrajectorySample> track, double t) {
  return !track.empty() && track.back().t + 1e-9 >= t;
}

WindowValues window_means(const std::vector<double>& times, const std::vector<double>& values,
                          std::span<const TrajectorySample> track,
                          const std::vector<Window>& windows, double horizon) {
  WindowValues out;
  for (const auto& w : windows) {
    if (!covers(track, w.end) || w.end > horizon + 1e-9) {
      out.emplace_back();
      continue;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (!w.contains(times[k])) continue;
      sum += values[k];
      ++count;
    }
    if (count == 0) {
      out.emplace_back();
    } else {
      out.emplace_back(sum / static_cast<double>(count));
    }
  }
  return out;
}

double neg_log(double p) { return -std::log(std::max(p, kDensityFloor)); }

}  // namespace

std::string Window::label() const { return trim_number(begin) + "-" + trim_number(end); }

std::vector<double> eval_times(double dt, double horizon) {
  if (!(dt > 0.0)) throw ArgumentError("eval dt must be > 0");
  std::vector<double> out;
  const auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) out.push_back(static_cast<double>(k) * dt);
  return out;
}

double silverman_bandwidth(std::span<const Vec2> points, std::span<const double> weights) {
  if (points.empty()) return kMinBandwidth;
  double wsum = 0.0, w2sum = 0.0;
  Vec2 mean{0.0, 0.0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    wsum += weights[i];
    w2sum += weights[i] * weights[i];
    mean = mean + weights[i] * points[i];
  }
  if (!(wsum > 0.0)) return kMinBandwidth;
  mean = (1.0 / wsum) * mean;
  double vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto d = points[i] - mean;
    vx += weights[i] * d.x * d.x;
    vy += weights[i] * d.y * d.y;
  }
  vx /= wsum;
  vy /= wsum;
  const double n_eff = wsum * wsum / w2sum;
  const double h = std::sqrt(0.5 * (vx + vy)) * std::pow(n_eff, -1.0 / 6.0);
  return std::max(h, kMinBandwidth);
}

double kde_density(std::span<const Vec2> points, std::span<const double> weights, double h,
                   Vec2 xy) {
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (points.empty() || !(wsum > 0.0)) return 0.0;
  std::vector<double> normalized(weights.begin(), weights.end());
  for (auto& w : normalized) w /= wsum;
  return spatial::mixture_density(normalized, points, h, xy);
}

NllCurve nll_mixture(const spatial::SpatioTemporalDistribution& dist,
                     std::span<const TrajectorySample> track, const std::vector<Window>& windows,
                     double dt, double horizon) {
  NllCurve out;
  std::vector<double> times;
  for (double t : eval_times(dt, horizon)) {
    if (covers(track, t)) times.push_back(t);
  }
  const auto snapshots = ctmc::distributions_at(dist.chain(), times);
  for (const auto& snap : snapshots) {
    const auto gt = *spatial::position_at(track, snap.t);
    out.times.push_back(snap.t);
    out.values.push_back(
        neg_log(spatial::mixture_density(snap.p, dist.positions(), dist.sigma(), gt)));
  }
  out.windows = window_means(out.times, out.values, track, windows, horizon);
  return out;
}

NllCurve nll_samples(const std::vector<DiscreteTrajectory>& predictions,
                     std::span<const TrajectorySample> track, const std::vector<Window>& windows,
                     double dt, double horizon) {
  NllCurve out;
  for (double t : eval_times(dt, horizon)) {
    if (!covers(track, t)) continue;
    std::vector<Vec2> points;
    std::vector<double> weights;
    for (const auto& traj : predictions) {
      if (auto p = spatial::position_at(traj.samples, t)) {
        points.push_back(*p);
        weights.push_back(traj.weight);
      }
    }
    const auto gt = *spatial::position_at(track, t);
    const double h = silverman_bandwidth(points, weights);
    out.times.push_back(t);
    out.values.push_back(neg_log(kde_density(points, weights, h, gt)));
  }
  out.windows = window_means(out.times, out.values, track, windows, horizon);
  return out;
}

WindowValues bon_ade(const std::vector<DiscreteTrajectory>& predictions,
                     std::span<const TrajectorySample> track, std::size_t n,
                     const std::vector<Window>& windows, bool squared) {
  if (predictions.empty()) throw ArgumentError("bon_ade: no predicted trajectories");
  if (n == 0) throw ArgumentError("bon_ade: n must be >= 1");
  const auto count = std::min(n, predictions.size());
  WindowValues out;
  for (const auto& w : windows) {
    std::optional<double> best;
    if (covers(track, w.end)) {
      for (std::size_t i = 0; i < count; ++i) {
        const auto& samples = predictions[i].samples;
        if (samples.empty() || samples.back().t + 1e-9 < w.end) continue;
        double sum = 0.0;
        std::size_t steps = 0;
        for (const auto& s : samples) {
          if (!w.contains(s.t)) continue;
          const double d2 = squared_norm(s.position - *spatial::position_at(track, s.t));
          sum += squared ? d2 : std::sqrt(d2);
          ++steps;
        }
        if (steps == 0) continue;
        const double ade = sum / static_cast<double>(steps);
        if (!best || ade < *best) best = ade;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace lp2::eval
