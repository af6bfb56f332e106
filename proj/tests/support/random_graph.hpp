#pragma once

#include <algorithm>
#include <random>

#include "nrcsim/network.hpp"

namespace testsupport {

/// Random strongly connected graph with 2..max_nodes nodes: a shuffled Hamilton
/// cycle plus random extra arcs (parallel arcs allowed), integer lengths 1..20
/// so equal-cost ties are common.
inline nrcsim::Network random_strong_graph(std::mt19937_64& rng, int max_nodes) {
  std::uniform_int_distribution<int> nodes_dist(2, max_nodes);
  const int n = nodes_dist(rng);
  std::vector<nrcsim::NodeId> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);

  nrcsim::Network net;
  for (int i = 0; i < n; ++i) net.add_node({i, static_cast<double>(i), 0.0});
  std::uniform_int_distribution<int> len(1, 20);
  nrcsim::EdgeId next_id = 0;
  auto add = [&](nrcsim::NodeId a, nrcsim::NodeId b) {
    net.add_edge({next_id++, a, b, static_cast<double>(len(rng)), 10.0, 1});
  };
  for (int i = 0; i < n; ++i) add(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>((i + 1) % n)]);
  std::uniform_int_distribution<int> extra(0, 2 * n);
  std::uniform_int_distribution<int> node(0, n - 1);
  for (int k = extra(rng); k > 0; --k) {
    const auto a = node(rng), b = node(rng);
    if (a != b) add(a, b);
  }
  return net;
}

inline nrcsim::EdgeId pick_edge(std::mt19937_64& rng, const nrcsim::Network& net) {
  std::uniform_int_distribution<std::size_t> d(0, net.edges().size() - 1);
  return net.edges()[d(rng)].id;
}

}  // namespace testsupport
