#pragma once

// Reference computations the tests compare the library against. Each one
// works from first principles (dense matrices, brute force, simulation)
// rather than calling the code under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "lp2/ctmc/ctmc.hpp"
#include "lp2/dsg/scene_graph.hpp"

namespace lp2::testing {

struct AllPairs {
  std::vector<std::vector<double>> dist;
  std::vector<std::vector<std::size_t>> next;  // first hop on a shortest path
};

/// Floyd-Warshall over the place layer, indexed like graph.places().
inline AllPairs floyd_warshall(const dsg::SceneGraph& graph) {
  const auto& places = graph.places();
  const auto n = places.size();
  const double inf = std::numeric_limits<double>::infinity();
  AllPairs ap{std::vector<std::vector<double>>(n, std::vector<double>(n, inf)),
              std::vector<std::vector<std::size_t>>(n, std::vector<std::size_t>(n, n))};
  std::map<dsg::NodeId, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i) slot[places[i]] = i;
  for (std::size_t i = 0; i < n; ++i) {
    ap.dist[i][i] = 0.0;
    ap.next[i][i] = i;
  }
  for (const auto& e : graph.edges()) {
    auto a = slot.find(e.a);
    auto b = slot.find(e.b);
    if (a == slot.end() || b == slot.end()) continue;
    const double d = distance(graph.node(e.a).position, graph.node(e.b).position);
    for (auto [i, j] : {std::pair{a->second, b->second}, std::pair{b->second, a->second}}) {
      if (d < ap.dist[i][j]) {
        ap.dist[i][j] = d;
        ap.next[i][j] = j;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double via = ap.dist[i][k] + ap.dist[k][j];
        if (via < ap.dist[i][j]) {
          ap.dist[i][j] = via;
          ap.next[i][j] = ap.next[i][k];
        }
      }
    }
  }
  return ap;
}

/// Dense column-generator matrix rebuilt from the per-state transitions.
inline std::vector<std::vector<double>> dense_q(const ctmc::Ctmc& chain) {
  const auto n = chain.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& tr : chain.outgoing(j)) {
      q[tr.to][j] += tr.rate;
      q[j][j] -= tr.rate;
    }
  }
  return q;
}

/// Monte-Carlo state histogram at each of the ascending `times`: jump
/// chain with exponential sojourns drawn from the dense generator.
inline std::vector<std::vector<double>> monte_carlo(const ctmc::Ctmc& chain,
                                                    const std::vector<double>& times,
                                                    std::size_t paths, std::uint64_t seed) {
  const auto q = dense_q(chain);
  const auto n = chain.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> hist(times.size(), std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < paths; ++r) {
    std::size_t s = 0;
    double t = 0.0;
    std::size_t next_time = 0;
    while (next_time < times.size()) {
      const double exit = -q[s][s];
      const double leave = exit > 0.0 ? t + std::exponential_distribution<double>(exit)(rng)
                                      : std::numeric_limits<double>::infinity();
      while (next_time < times.size() && times[next_time] < leave) hist[next_time++][s] += 1.0;
      if (next_time == times.size()) break;
      double pick = unit(rng) * exit;
      std::size_t to = s;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == s || q[i][s] <= 0.0) continue;
        to = i;
        if (pick < q[i][s]) break;
        pick -= q[i][s];
      }
      s = to;
      t = leave;
    }
  }
  for (auto& h : hist) {
    for (auto& v : h) v /= static_cast<double>(paths);
  }
  return hist;
}

/// Midpoint-rule integral of f over [x0, x1] x [y0, y1] on an n x n grid.
template <class F>
double integrate_2d(F&& f, double x0, double x1, double y0, double y1, std::size_t n) {
  const double hx = (x1 - x0) / static_cast<double>(n);
  const double hy = (y1 - y0) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sum += f(Vec2{x0 + (static_cast<double>(i) + 0.5) * hx, y0 + (static_cast<double>(j) + 0.5) * hy});
    }
  }
  return sum * hx * hy;
}

}  // namespace lp2::testing
