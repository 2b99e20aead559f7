// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gatroute {

using NodeId = int;

/// Hop count used by shortest_hops() for nodes that cannot reach the target.
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

struct Link {
  NodeId u = 0;
  NodeId v = 0;
  double delay = 1.0;
};

/// Directed graph of routers. Every link carries a strictly positive
/// transmission delay; adjacency lists are kept sorted by neighbor id.
/// Immutable once built.
class Topology {
 public:
  Topology() = default;
  explicit Topology(int node_count);

  /// Adds u->v and v->u with the same delay.
  void add_bidirectional(NodeId u, NodeId v, double delay);

  int node_count() const noexcept { return static_cast<int>(neighbors_.size()); }
  std::span<const NodeId> neighbors(NodeId i) const;
  bool has_link(NodeId u, NodeId v) const;
  /// Transmission delay of u->v. Throws ContractViolation if absent.
  double delay(NodeId u, NodeId v) const;
  std::size_t directed_link_count() const noexcept;
  bool valid(NodeId i) const noexcept { return i >= 0 && i < node_count(); }
  /// Every node can reach every other node.
  bool connected() const;

  /// Undirected link list (u < v), ordered by (u, v).
  std::vector<Link> undirected_links() const;

 private:
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<std::vector<double>> delays_;
};

/// Parses the plain-text topology format: first non-comment line is the node
/// count, then one `u v delay` line per undirected link. `#` starts a comment.
Topology load_topology(std::string_view text);
Topology load_topology_file(const std::string& path);
std::string to_text(const Topology& t);

/// {i} together with the neighbors of i, sorted.
std::vector<NodeId> closed_neighborhood(const Topology& t, NodeId i);

/// Breadth-first hop distance from every node to dst (kUnreachable if none).
std::vector<int> shortest_hops(const Topology& t, NodeId dst);

/// Row-stochastic averaging weights: row i is uniform over the closed
/// neighborhood of i (adjacency with self-loops, normalized by row degree).
class ConsensusMatrix {
 public:
  explicit ConsensusMatrix(int n) : n_(n), w_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const noexcept { return n_; }
  double operator()(int i, int j) const { return w_[static_cast<std::size_t>(i) * n_ + j]; }
  double& operator()(int i, int j) { return w_[static_cast<std::size_t>(i) * n_ + j]; }
  std::span<const double> row(int i) const {
    return {w_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

 private:
  int n_;
  std::vector<double> w_;
};

ConsensusMatrix consensus_matrix(const Topology& t);

/// 4-connected rows x cols grid with unit delays, minus the listed links.
/// Node (r, c) has id r * cols + c. Throws if a removal is not a grid edge
/// or disconnects the grid.
Topology grid_topology(int rows, int cols, std::span<const std::pair<NodeId, NodeId>> removed = {});

}  // namespace gatroute
