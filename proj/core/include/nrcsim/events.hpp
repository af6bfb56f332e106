#pragma once

#include <vector>

#include "nrcsim/network.hpp"

namespace nrcsim {

/// Edges closed over the half-open window [start, end).
struct ClosureEvent {
  std::vector<EdgeId> edge_ids;
  double start = 1200.0;
  double end = 2400.0;

  bool active_at(double t) const noexcept { return start <= t && t < end; }
};

struct ClosureTransition {
  EdgeId edge = 0;
  bool closed = false;  // new state

  friend bool operator==(const ClosureTransition&, const ClosureTransition&) = default;
};

/// Throws ConfigError when an event has start < 0, end <= start, or names an
/// edge that is not in the network.
void validate_events(const Network& network, const std::vector<ClosureEvent>& events);

/// Sets every edge's closed flag to whether some event covers it at time t and
/// returns the edges whose flag changed, in ascending edge-index order.
std::vector<ClosureTransition> apply_events(Network& network, const std::vector<ClosureEvent>& events,
                                            double t);

}  // namespace nrcsim
