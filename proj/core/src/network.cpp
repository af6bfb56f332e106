#include "nrcsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "nrcsim/error.hpp"
#include "text_util.hpp"

namespace nrcsim {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

void Network::add_node(Node node) {
  if (node_index_.contains(node.id)) {
    throw std::invalid_argument(fmt::format("duplicate node id {}", node.id));
  }
  node_index_.emplace(node.id, nodes_.size());
  nodes_.push_back(node);
  out_.emplace_back();
  in_.emplace_back();
}

void Network::add_edge(Edge edge) {
  if (edge_index_.contains(edge.id)) {
    throw std::invalid_argument(fmt::format("duplicate edge id {}", edge.id));
  }
  if (!node_index_.contains(edge.from)) {
    throw std::invalid_argument(fmt::format("edge {} references unknown node {}", edge.id, edge.from));
  }
  if (!node_index_.contains(edge.to)) {
    throw std::invalid_argument(fmt::format("edge {} references unknown node {}", edge.id, edge.to));
  }
  if (edge.from == edge.to) {
    throw std::invalid_argument(fmt::format("edge {} is a self loop", edge.id));
  }
  if (!(edge.length > 0.0) || !std::isfinite(edge.length)) {
    throw std::invalid_argument(fmt::format("edge {} has non-positive length", edge.id));
  }
  if (!(edge.speed_limit > 0.0) || !std::isfinite(edge.speed_limit)) {
    throw std::invalid_argument(fmt::format("edge {} has non-positive speed limit", edge.id));
  }
  if (edge.lane_count < 1) {
    throw std::invalid_argument(fmt::format("edge {} needs at least one lane", edge.id));
  }
  const std::size_t idx = edges_.size();
  edge_index_.emplace(edge.id, idx);
  out_[node_index_.at(edge.from)].push_back(idx);
  in_[node_index_.at(edge.to)].push_back(idx);
  edges_.push_back(edge);
}

std::size_t Network::node_index(NodeId id) const {
  const auto it = node_index_.find(id);
  if (it == node_index_.end()) throw std::out_of_range(fmt::format("unknown node id {}", id));
  return it->second;
}

std::size_t Network::edge_index(EdgeId id) const {
  const auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw std::out_of_range(fmt::format("unknown edge id {}", id));
  return it->second;
}

const std::vector<std::size_t>& Network::successors(std::size_t edge_idx) const {
  return out_[node_index_.at(edges_[edge_idx].to)];
}

void Network::open_all() noexcept {
  for (auto& e : edges_) e.closed = false;
}

Network build_grid(int rows, int cols, double edge_length, double speed_limit, int lanes) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs at least 2 rows and 2 columns");
  if (!(edge_length > 0.0)) throw std::invalid_argument("grid edge length must be positive");
  if (!(speed_limit > 0.0)) throw std::invalid_argument("grid speed limit must be positive");
  if (lanes < 1) throw std::invalid_argument("grid lanes must be >= 1");

  Network net;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      net.add_node({r * cols + c, c * edge_length, r * edge_length});
    }
  }
  EdgeId next_id = 0;
  auto link = [&](NodeId a, NodeId b) {
    net.add_edge({next_id++, a, b, edge_length, speed_limit, lanes, false});
    net.add_edge({next_id++, b, a, edge_length, speed_limit, lanes, false});
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const NodeId id = r * cols + c;
      if (c + 1 < cols) link(id, id + 1);
      if (r + 1 < rows) link(id, id + cols);
    }
  }
  return net;
}

std::vector<EdgeId> central_edges(const Network& network, int k) {
  if (k < 1) throw std::invalid_argument("central_edges: k must be >= 1");
  if (network.empty()) throw std::invalid_argument("central_edges: empty network");

  double cx = 0.0;
  double cy = 0.0;
  for (const auto& n : network.nodes()) {
    cx += n.x;
    cy += n.y;
  }
  cx /= static_cast<double>(network.nodes().size());
  cy /= static_cast<double>(network.nodes().size());

  // Undirected links keyed by their (min, max) endpoint pair.
  std::map<std::pair<NodeId, NodeId>, std::vector<EdgeId>> links;
  for (const auto& e : network.edges()) {
    links[{std::min(e.from, e.to), std::max(e.from, e.to)}].push_back(e.id);
  }
  if (static_cast<std::size_t>(k) > links.size()) {
    throw std::invalid_argument(
        fmt::format("central_edges: k={} exceeds the {} links of the network", k, links.size()));
  }

  struct Candidate {
    double dist2;
    EdgeId min_id;
    std::vector<EdgeId> ids;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(links.size());
  for (auto& [ends, ids] : links) {
    const auto& a = network.node(ends.first);
    const auto& b = network.node(ends.second);
    const double mx = 0.5 * (a.x + b.x) - cx;
    const double my = 0.5 * (a.y + b.y) - cy;
    std::sort(ids.begin(), ids.end());
    candidates.push_back({mx * mx + my * my, ids.front(), ids});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
    if (l.dist2 != r.dist2) return l.dist2 < r.dist2;
    return l.min_id < r.min_id;
  });

  std::vector<EdgeId> out;
  for (int i = 0; i < k; ++i) {
    out.insert(out.end(), candidates[i].ids.begin(), candidates[i].ids.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Network load_network(std::string_view text) {
  Network net;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto tok = detail::split_ws(line);
    auto num = [&](std::size_t i, const char* field) {
      const auto v = detail::parse_number<double>(tok[i]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(line_no, fmt::format("invalid {} '{}'", field, tok[i]));
      }
      return *v;
    };
    auto id = [&](std::size_t i, const char* field) {
      const auto v = detail::parse_number<std::int64_t>(tok[i]);
      if (!v) throw ParseError(line_no, fmt::format("invalid {} '{}'", field, tok[i]));
      return *v;
    };

    if (tok[0] == "node") {
      if (tok.size() != 4) throw ParseError(line_no, "expected: node <id> <x> <y>");
      const Node n{id(1, "node id"), num(2, "x"), num(3, "y")};
      if (net.has_node(n.id)) throw ParseError(line_no, fmt::format("duplicate node id {}", n.id));
      net.add_node(n);
    } else if (tok[0] == "edge") {
      if (tok.size() != 7) {
        throw ParseError(line_no, "expected: edge <id> <from> <to> <length> <speed_limit> <lanes>");
      }
      Edge e;
      e.id = id(1, "edge id");
      e.from = id(2, "from node");
      e.to = id(3, "to node");
      e.length = num(4, "length");
      e.speed_limit = num(5, "speed limit");
      const auto lanes = id(6, "lane count");
      if (!net.has_node(e.from)) throw ParseError(line_no, fmt::format("unknown node id {}", e.from));
      if (!net.has_node(e.to)) throw ParseError(line_no, fmt::format("unknown node id {}", e.to));
      if (net.has_edge(e.id)) throw ParseError(line_no, fmt::format("duplicate edge id {}", e.id));
      if (e.from == e.to) throw ParseError(line_no, "edge endpoints must differ");
      if (!(e.length > 0.0)) throw ParseError(line_no, "edge length must be positive");
      if (!(e.speed_limit > 0.0)) throw ParseError(line_no, "edge speed limit must be positive");
      if (lanes < 1 || lanes > std::numeric_limits<int>::max()) {
        throw ParseError(line_no, "edge lane count must be >= 1");
      }
      e.lane_count = static_cast<int>(lanes);
      net.add_edge(e);
    } else {
      throw ParseError(line_no, fmt::format("unknown record '{}'", tok[0]));
    }
  });
  return net;
}

std::string save_network(const Network& network) {
  std::string out;
  out += fmt::format("# nodes={} edges={}\n", network.nodes().size(), network.edges().size());
  for (const auto& n : network.nodes()) {
    out += fmt::format("node {} {} {}\n", n.id, n.x, n.y);
  }
  for (const auto& e : network.edges()) {
    out += fmt::format("edge {} {} {} {} {} {}\n", e.id, e.from, e.to, e.length, e.speed_limit,
                       e.lane_count);
  }
  return out;
}

Network load_network_file(const std::string& path) { return load_network(detail::read_file(path)); }

}  // namespace nrcsim
