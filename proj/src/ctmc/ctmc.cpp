#include "lp2/ctmc/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lp2/error.hpp"

namespace lp2::ctmc {

using tree::NodeKind;

Ctmc::Ctmc(std::vector<std::size_t> tree_ids, std::vector<std::vector<Transition>> outgoing,
           double v_walk, bool no_interaction_times)
    : tree_ids_(std::move(tree_ids)),
      outgoing_(std::move(outgoing)),
      v_walk_(v_walk),
      no_interaction_times_(no_interaction_times) {
  if (outgoing_.size() != tree_ids_.size()) throw ArgumentError("Ctmc: state count mismatch");
  exit_rate_.resize(size(), 0.0);
  for (std::size_t j = 0; j < size(); ++j) {
    for (const auto& tr : outgoing_[j]) {
      if (tr.to >= size() || tr.to == j) throw ArgumentError("Ctmc: invalid transition target");
      if (!(tr.rate > 0.0) || !std::isfinite(tr.rate)) throw ArgumentError("Ctmc: invalid rate");
      exit_rate_[j] += tr.rate;
    }
    max_exit_rate_ = std::max(max_exit_rate_, exit_rate_[j]);
  }
}

std::optional<std::size_t> Ctmc::state_of(std::size_t tree_id) const {
  auto it = std::lower_bound(tree_ids_.begin(), tree_ids_.end(), tree_id);
  if (it == tree_ids_.end() || *it != tree_id) return std::nullopt;
  return static_cast<std::size_t>(it - tree_ids_.begin());
}

double Ctmc::q(std::size_t i, std::size_t j) const {
  if (i == j) return -exit_rate_[j];
  for (const auto& tr : outgoing_[j]) {
    if (tr.to == i) return tr.rate;
  }
  return 0.0;
}

std::vector<double> Ctmc::dense() const {
  const auto n = size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    m[j * n + j] = -exit_rate_[j];
    for (const auto& tr : outgoing_[j]) m[tr.to * n + j] += tr.rate;
  }
  return m;
}

void Ctmc::apply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < size(); ++j) {
    if (x[j] == 0.0) continue;
    y[j] -= exit_rate_[j] * x[j];
    for (const auto& tr : outgoing_[j]) y[tr.to] += tr.rate * x[j];
  }
}

Ctmc build_generator(const tree::InteractionTree& tree, const GeneratorOptions& options) {
  if (!tree.grounded) throw ArgumentError("build_generator: tree is not grounded");
  if (!(options.v_walk > 0.0)) throw ArgumentError("build_generator: v_walk must be > 0");

  const auto eliminated = [&](const tree::TreeNode& n) {
    return options.no_interaction_times && n.kind == NodeKind::interaction && !n.children.empty();
  };

  std::vector<std::size_t> ids;
  for (const auto& n : tree.nodes) {
    if (!eliminated(n)) ids.push_back(n.id);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<std::size_t> state(tree.nodes.size(), tree.nodes.size());
  for (std::size_t s = 0; s < ids.size(); ++s) state[ids[s]] = s;
  if (state[tree.root] != 0) throw InternalError("build_generator: root must be the first state");

  std::vector<std::vector<Transition>> outgoing(ids.size());
  std::function<void(std::size_t, std::size_t, double)> route =
      [&](std::size_t from, std::size_t child, double rate) {
        const auto& c = tree.node(child);
        if (!eliminated(c)) {
          outgoing[from].push_back({state[child], rate});
          return;
        }
        double total = 0.0;
        for (auto g : c.children) total += tree.node(g).branch_probability;
        for (auto g : c.children) route(from, g, rate * tree.node(g).branch_probability / total);
      };

  for (std::size_t s = 0; s < ids.size(); ++s) {
    const auto& u = tree.node(ids[s]);
    if (u.children.empty()) continue;  // absorbing leaf
    switch (u.kind) {
      case NodeKind::root:
      case NodeKind::path: {
        if (!(u.segment_length > 0.0)) {
          throw ArgumentError("build_generator: zero-length segment at node " + std::to_string(u.id));
        }
        if (u.kind == NodeKind::path && u.children.size() != 1) {
          throw InternalError("build_generator: path node with " +
                              std::to_string(u.children.size()) + " children");
        }
        const double walk = options.v_walk / u.segment_length;
        for (auto c : u.children) {
          const double share = u.kind == NodeKind::root ? tree.node(c).branch_probability : 1.0;
          route(s, c, share * walk);
        }
        break;
      }
      case NodeKind::interaction: {
        if (!(u.duration_s > 0.0)) {
          throw ArgumentError("build_generator: interaction node " + std::to_string(u.id) +
                              " has non-positive duration");
        }
        for (auto c : u.children) route(s, c, tree.node(c).branch_probability / u.duration_s);
        break;
      }
    }
  }
  return Ctmc(std::move(ids), std::move(outgoing), options.v_walk, options.no_interaction_times);
}

std::vector<double> evolve(const Ctmc& chain, std::span<const double> p, double dt,
                           double tolerance) {
  if (dt < 0.0) throw ArgumentError("evolve: negative time step");
  if (p.size() != chain.size()) throw ArgumentError("evolve: dimension mismatch");
  std::vector<double> result(p.begin(), p.end());
  const double lambda = chain.max_exit_rate();
  if (dt == 0.0 || lambda == 0.0) return result;

  // P = I + Q / lambda is column stochastic; exp(Q dt) = sum_k Pois(k; lambda dt) P^k.
  const double mean = lambda * dt;
  const double log_mean = std::log(mean);
  std::vector<double> term(p.begin(), p.end());
  std::vector<double> qx(p.size());
  std::fill(result.begin(), result.end(), 0.0);

  double mass = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double w = std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    if (w > 0.0) {
      for (std::size_t i = 0; i < term.size(); ++i) result[i] += w * term[i];
      mass += w;
    }
    if (kd >= mean && 1.0 - mass < tolerance) break;
    if (kd > mean + 50.0 * std::sqrt(mean) + 50.0) break;  // rounding floor reached
    chain.apply(term, qx);
    for (std::size_t i = 0; i < term.size(); ++i) term[i] += qx[i] / lambda;
  }
  for (auto& v : result) v /= mass;
  return result;
}

StateDistribution distribution_at(const Ctmc& chain, double t, double tolerance) {
  if (t < 0.0) throw ArgumentError("distribution_at: t must be >= 0");
  std::vector<double> p0(chain.size(), 0.0);
  p0[chain.initial()] = 1.0;
  return {t, evolve(chain, p0, t, tolerance)};
}

std::vector<StateDistribution> distributions_at(const Ctmc& chain, std::span<const double> times,
                                                double tolerance) {
  std::vector<StateDistribution> out;
  out.reserve(times.size());
  std::vector<double> p(chain.size(), 0.0);
  p[chain.initial()] = 1.0;
  double now = 0.0;
  for (double t : times) {
    if (t < now) throw ArgumentError("distributions_at: times must be ascending and >= 0");
    p = evolve(chain, p, t - now, tolerance);
    now = t;
    out.push_back({t, p});
  }
  return out;
}

StateDistribution steady_state(const Ctmc& chain) {
  // States are topologically ordered, so one forward sweep pushes all
  // transient mass into the absorbing leaves.
  std::vector<double> flow(chain.size(), 0.0);
  flow[chain.initial()] = 1.0;
  StateDistribution out{std::numeric_limits<double>::infinity(), std::vector<double>(chain.size(), 0.0)};
  for (std::size_t j = 0; j < chain.size(); ++j) {
    if (flow[j] == 0.0) continue;
    if (chain.absorbing(j)) {
      out.p[j] = flow[j];
      continue;
    }
    for (const auto& tr : chain.outgoing(j)) flow[tr.to] += flow[j] * tr.rate / chain.exit_rate(j);
  }
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("tv_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

std::optional<double> horizon_of_meaning(const Ctmc& chain, double threshold, double t_max,
                                         double dt) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ArgumentError("horizon_of_meaning: threshold must lie in (0, 1]");
  }
  if (!(dt > 0.0)) throw ArgumentError("horizon_of_meaning: dt must be > 0");
  constexpr double kResolution = 0.05;

  const auto steady = steady_state(chain);
  std::vector<double> p(chain.size(), 0.0);
  p[chain.initial()] = 1.0;
  if (tv_distance(p, steady.p) < threshold) return 0.0;

  double t = 0.0;
  for (std::size_t k = 1;; ++k) {
    const double next = static_cast<double>(k) * dt;
    if (next > t_max + 1e-9) return std::nullopt;
    auto p_next = evolve(chain, p, next - t);
    if (tv_distance(p_next, steady.p) < threshold) {
      // Bisect on (t, next]; TV is non-increasing because it equals the
      // transient mass.
      double lo = t, hi = next;
      while (hi - lo > kResolution) {
        const double mid = 0.5 * (lo + hi);
        auto p_mid = evolve(chain, p, mid - lo);
        if (tv_distance(p_mid, steady.p) < threshold) {
          hi = mid;
        } else {
          lo = mid;
          p = std::move(p_mid);
        }
      }
      return hi;
    }
    p = std::move(p_next);
    t = next;
  }
}

nlohmann::json to_json(const Ctmc& chain) {
  nlohmann::json doc;
  doc["v_walk"] = chain.v_walk();
  doc["no_interaction_times"] = chain.no_interaction_times();
  doc["states"] = chain.tree_ids();
  auto& entries = doc["entries"] = nlohmann::json::array();
  for (std::size_t j = 0; j < chain.size(); ++j) {
    if (!chain.absorbing(j)) entries.push_back({j, j, -chain.exit_rate(j)});
    for (const auto& tr : chain.outgoing(j)) entries.push_back({tr.to, j, tr.rate});
  }
  return doc;
}

}  // namespace lp2::ctmc
