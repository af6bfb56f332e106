#include "nrcsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace nrcsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Backward Dijkstra: cost_to_target[e] = length of the shortest route from the
/// start of e to the end of the target (inclusive of both). The source is
/// admitted even when closed if `source_may_be_closed`.
std::optional<Route> route_between(const Network& net, EdgeId from_edge, EdgeId to_edge,
                                   bool source_may_be_closed) {
  const std::size_t src = net.edge_index(from_edge);
  const std::size_t dst = net.edge_index(to_edge);
  const auto& edges = net.edges();
  if (edges[dst].closed) return std::nullopt;
  if (edges[src].closed && !source_may_be_closed) return std::nullopt;
  if (src == dst) return Route{{from_edge}, edges[src].length};

  std::vector<double> cost(edges.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  cost[dst] = edges[dst].length;
  heap.emplace(cost[dst], dst);
  while (!heap.empty()) {
    const auto [c, e] = heap.top();
    heap.pop();
    if (c > cost[e]) continue;
    if (e == src) break;
    for (const std::size_t p : net.in_edges(net.node_index(edges[e].from))) {
      if (edges[p].closed && p != src) continue;
      if (p == dst) continue;
      const double nc = c + edges[p].length;
      if (nc < cost[p]) {
        cost[p] = nc;
        heap.emplace(nc, p);
      }
    }
  }
  if (!std::isfinite(cost[src])) return std::nullopt;

  // Forward walk picking the smallest-id successor that stays on an optimal route.
  Route route;
  route.cost = cost[src];
  std::size_t cur = src;
  route.edges.push_back(edges[cur].id);
  while (cur != dst) {
    const double remaining = cost[cur] - edges[cur].length;
    const double tol = 1e-9 * std::max(1.0, cost[cur]);
    std::size_t best = edges.size();
    for (const std::size_t s : net.successors(cur)) {
      if (!std::isfinite(cost[s]) || edges[s].closed) continue;
      if (std::abs(cost[s] - remaining) > tol) continue;
      if (best == edges.size() || edges[s].id < edges[best].id) best = s;
    }
    cur = best;
    route.edges.push_back(edges[cur].id);
  }
  return route;
}

}  // namespace

std::optional<Route> shortest_path(const Network& network, EdgeId from_edge, EdgeId to_edge) {
  return route_between(network, from_edge, to_edge, false);
}

std::optional<Route> continue_route(const Network& network, EdgeId current_edge, EdgeId to_edge) {
  return route_between(network, current_edge, to_edge, true);
}

bool is_connected_route(const Network& network, std::span<const EdgeId> edges) {
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (network.edge(edges[i]).to != network.edge(edges[i + 1]).from) return false;
  }
  return true;
}

double route_length(const Network& network, std::span<const EdgeId> edges) {
  double total = 0.0;
  for (const EdgeId e : edges) total += network.edge(e).length;
  return total;
}

RerouteDecision plan_reroute(const RouteProgress& vehicle, const Network& network,
                             const ReroutePolicy& policy) {
  const auto& route = vehicle.route;
  std::size_t first_closed = route.size();
  for (std::size_t i = vehicle.route_index + 1; i < route.size(); ++i) {
    if (network.edge(route[i]).closed) {
      first_closed = i;
      break;
    }
  }
  if (first_closed == route.size()) return {};

  if (policy.mode == ReroutePolicy::Mode::AtJunction) {
    if (first_closed != vehicle.route_index + 1) return {};
    const double to_junction = network.edge(route[vehicle.route_index]).length - vehicle.pos;
    if (to_junction > policy.sign_distance) return {};
  }

  auto fresh = continue_route(network, route[vehicle.route_index], route.back());
  if (!fresh) return {RerouteDecision::Kind::Unreachable, {}};
  return {RerouteDecision::Kind::Replace, std::move(*fresh)};
}

}  // namespace nrcsim
