#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nrcsim/demand.hpp"
#include "nrcsim/network.hpp"

namespace nrcsim {

/// Ordered edge sequence; cost is the summed edge length in meters.
struct Route {
  std::vector<EdgeId> edges;
  double cost = 0.0;

  friend bool operator==(const Route&, const Route&) = default;
};

/// Minimum-length route that starts with `from_edge` and ends with `to_edge`,
/// avoiding closed edges. Among equal-length routes the lexicographically
/// smallest edge-id sequence wins. Returns nullopt when the destination is not
/// reachable (including when either end is closed).
/// Throws std::out_of_range for unknown edge ids.
std::optional<Route> shortest_path(const Network& network, EdgeId from_edge, EdgeId to_edge);

/// As shortest_path, but `current_edge` may itself be closed: the vehicle is
/// already on it and only the edges after it must be open.
std::optional<Route> continue_route(const Network& network, EdgeId current_edge, EdgeId to_edge);

/// True when consecutive edges share a node (head of i == tail of i + 1).
bool is_connected_route(const Network& network, std::span<const EdgeId> edges);

double route_length(const Network& network, std::span<const EdgeId> edges);

/// When a vehicle learns about closures on its route.
struct ReroutePolicy {
  enum class Mode {
    Immediate,   // any closed edge ahead triggers a new route at once
    AtJunction,  // only once the vehicle is within sign_distance of the
                 // junction in front of the first closed edge
  };
  Mode mode = Mode::Immediate;
  double sign_distance = 30.0;  // m

  static ReroutePolicy immediate() { return {Mode::Immediate, 0.0}; }
  static ReroutePolicy at_junction(double sign_distance) { return {Mode::AtJunction, sign_distance}; }
};

/// The part of a vehicle's state that rerouting looks at.
struct RouteProgress {
  std::span<const EdgeId> route;  // full planned route
  std::size_t route_index = 0;    // index of the edge the vehicle is on
  double pos = 0.0;               // m from the start of the current edge
};

struct RerouteDecision {
  enum class Kind { Keep, Replace, Unreachable };
  Kind kind = Kind::Keep;
  /// For Replace: new route starting with the vehicle's current edge.
  Route route;
};

/// Decides whether a vehicle must change route given the network's current
/// closure flags. Keep means no closed edge is ahead or the policy has not yet
/// revealed it; Unreachable means no open route to the destination exists.
RerouteDecision plan_reroute(const RouteProgress& vehicle, const Network& network,
                             const ReroutePolicy& policy);

}  // namespace nrcsim
