#pragma once

// Independent reference computations used only by the tests. Nothing here calls
// into the library beyond plain data accessors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "nrcsim/network.hpp"

namespace oracle {

/// Unordered pairs of orthogonally adjacent lattice cells.
inline int adjacent_pairs(int rows, int cols) {
  int n = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int r2 = 0; r2 < rows; ++r2) {
        for (int c2 = 0; c2 < cols; ++c2) {
          if (r * cols + c >= r2 * cols + c2) continue;
          if (std::abs(r - r2) + std::abs(c - c2) == 1) ++n;
        }
      }
    }
  }
  return n;
}

/// Every node reaches every other node through open edges (plain DFS per node).
inline bool strongly_connected(const nrcsim::Network& net) {
  const auto& nodes = net.nodes();
  for (const auto& start : nodes) {
    std::set<nrcsim::NodeId> seen{start.id};
    std::vector<nrcsim::NodeId> stack{start.id};
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      for (const auto& e : net.edges()) {
        if (e.from == n && !e.closed && seen.insert(e.to).second) stack.push_back(e.to);
      }
    }
    if (seen.size() != nodes.size()) return false;
  }
  return true;
}

/// Minimum cost of an open edge sequence starting with `from` and ending with
/// `to`. The middle part is a node-simple walk from the head of `from` to the
/// tail of `to`, enumerated exhaustively by DFS. Returns nullopt when unreachable.
inline std::optional<double> min_path_cost(const nrcsim::Network& net, nrcsim::EdgeId from, nrcsim::EdgeId to) {
  const auto& src = net.edge(from);
  const auto& dst = net.edge(to);
  if (src.closed || dst.closed) return std::nullopt;
  if (from == to) return src.length;
  std::optional<double> best;
  std::set<nrcsim::NodeId> visited;
  std::function<void(nrcsim::NodeId, double)> dfs = [&](nrcsim::NodeId at, double cost) {
    if (at == dst.from) {
      const double total = src.length + cost + dst.length;
      if (!best || total < *best) best = total;
    }
    for (const auto& e : net.edges()) {
      if (e.from != at || e.closed || visited.contains(e.to)) continue;
      visited.insert(e.to);
      dfs(e.to, cost + e.length);
      visited.erase(e.to);
    }
  };
  visited.insert(src.to);
  dfs(src.to, 0.0);
  return best;
}

/// Critical episodes in a TTC series: maximal runs of present values at or
/// below `threshold`.
inline std::int64_t run_length_episodes(const std::vector<std::optional<double>>& series, double threshold) {
  std::int64_t runs = 0;
  std::size_t i = 0;
  while (i < series.size()) {
    const auto crit = [&](std::size_t k) { return series[k].has_value() && *series[k] <= threshold; };
    if (!crit(i)) {
      ++i;
      continue;
    }
    ++runs;
    while (i < series.size() && crit(i)) ++i;
  }
  return runs;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Step at which a lone vehicle accelerating from rest at `accel` up to
/// `limit` first covers `length` metres, with per-step speed update then
/// position update. Returns the 1-based step number.
inline int crossing_step(double accel, double limit, double length, double dt = 1.0) {
  double v = 0, x = 0;
  for (int step = 1; step < 100000; ++step) {
    v = std::min(v + accel * dt, limit);
    x += v * dt;
    if (x >= length) return step;
  }
  return -1;
}

/// Textbook IDM acceleration written out independently.
inline double idm(double v, double dv, double s, double a, double b, double T, double s0, double delta, double v0) {
  const double s_star = s0 + std::max(0.0, v * T + v * dv / (2.0 * std::sqrt(a * b)));
  return a * (1.0 - std::pow(v / v0, delta) - (s_star / s) * (s_star / s));
}

struct PlatoonResult {
  double follower_speed;
  double gap;
};

/// Leader at constant `v_lead`; follower integrated with explicit Euler on
/// speed then position, starting at rest `gap0` behind. Returns the state
/// after `seconds`.
inline PlatoonResult idm_two_vehicle(double v_lead, double gap0, double seconds, double dt, double a, double b,
                                     double T, double s0, double delta, double v0) {
  double v = 0, gap = gap0;
  for (double t = 0; t < seconds - 1e-9; t += dt) {
    const double acc = idm(v, v - v_lead, gap, a, b, T, s0, delta, v0);
    const double nv = std::clamp(v + acc * dt, 0.0, v0);
    gap += (v_lead - nv) * dt;
    v = nv;
  }
  return {v, gap};
}

}  // namespace oracle
