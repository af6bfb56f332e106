#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nrcsim {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;

struct Node {
  NodeId id = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  EdgeId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length = 0.0;       // m
  double speed_limit = 0.0;  // m/s
  int lane_count = 1;
  bool closed = false;  // runtime state, owned by the engine

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed road graph. Node and edge ids are arbitrary integers; the network
/// also keeps dense indices (position in nodes()/edges()) which the engine and
/// router use internally.
class Network {
 public:
  Network() = default;

  /// Throws std::invalid_argument on duplicate ids.
  void add_node(Node node);
  /// Throws std::invalid_argument on dangling endpoints, self loops, duplicate
  /// ids, or non-positive length/speed/lanes.
  void add_edge(Edge edge);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool empty() const noexcept { return nodes_.empty(); }

  bool has_node(NodeId id) const { return node_index_.contains(id); }
  bool has_edge(EdgeId id) const { return edge_index_.contains(id); }
  std::size_t node_index(NodeId id) const;
  std::size_t edge_index(EdgeId id) const;

  const Node& node(NodeId id) const { return nodes_[node_index(id)]; }
  const Edge& edge(EdgeId id) const { return edges_[edge_index(id)]; }

  /// Outgoing edge indices for the node at `node_idx`, in insertion order.
  const std::vector<std::size_t>& out_edges(std::size_t node_idx) const { return out_[node_idx]; }
  /// Incoming edge indices for the node at `node_idx`, in insertion order.
  const std::vector<std::size_t>& in_edges(std::size_t node_idx) const { return in_[node_idx]; }

  /// Edge successors of the edge at `edge_idx`: outgoing edges of its head node.
  const std::vector<std::size_t>& successors(std::size_t edge_idx) const;

  void set_closed(std::size_t edge_idx, bool closed) { edges_[edge_idx].closed = closed; }
  void open_all() noexcept;

  /// Structural equality: same nodes, edges (including closure flags) in the same order.
  friend bool operator==(const Network& a, const Network& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<EdgeId, std::size_t> edge_index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// Regular lattice with `rows` x `cols` junctions spaced `edge_length` apart.
/// Node ids are row-major (id = r * cols + c, x = c * len, y = r * len). For each
/// node in row-major order the link to its right neighbour is emitted, then the
/// link to the neighbour below; every link becomes two edges with consecutive
/// ids (forward first), so edges 2k and 2k+1 are the two directions of link k.
Network build_grid(int rows, int cols, double edge_length = 100.0, double speed_limit = 13.89,
                   int lanes = 1);

/// Ids of the `k` undirected links whose midpoints lie nearest the centroid of
/// all node coordinates (ties by smallest member edge id). Both directions of
/// each selected link are returned, sorted ascending.
std::vector<EdgeId> central_edges(const Network& network, int k);

/// Plain-text network format:
///   node <id> <x> <y>
///   edge <id> <from> <to> <length> <speed_limit> <lanes>
/// '#' starts a comment. Throws ParseError with the offending line number.
Network load_network(std::string_view text);
std::string save_network(const Network& network);

Network load_network_file(const std::string& path);

}  // namespace nrcsim
