#include "nrcsim/events.hpp"

#include <fmt/format.h>

#include "nrcsim/error.hpp"

namespace nrcsim {

void validate_events(const Network& network, const std::vector<ClosureEvent>& events) {
  for (const auto& ev : events) {
    if (!(ev.start >= 0.0) || !(ev.end > ev.start)) {
      throw ConfigError(fmt::format("closure window [{}, {}) must satisfy 0 <= start < end", ev.start, ev.end));
    }
    for (const EdgeId id : ev.edge_ids) {
      if (!network.has_edge(id)) throw ConfigError(fmt::format("closure references unknown edge {}", id));
    }
  }
}

std::vector<ClosureTransition> apply_events(Network& network, const std::vector<ClosureEvent>& events,
                                            double t) {
  std::vector<char> should_close(network.edges().size(), 0);
  for (const auto& ev : events) {
    if (!ev.active_at(t)) continue;
    for (const EdgeId id : ev.edge_ids) should_close[network.edge_index(id)] = 1;
  }
  std::vector<ClosureTransition> changed;
  for (std::size_t i = 0; i < should_close.size(); ++i) {
    const bool now = should_close[i] != 0;
    if (network.edges()[i].closed != now) {
      network.set_closed(i, now);
      changed.push_back({network.edges()[i].id, now});
    }
  }
  return changed;
}

}  // namespace nrcsim
