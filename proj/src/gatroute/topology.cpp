// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>

#include "gatroute/error.hpp"

namespace gatroute {

Topology::Topology(int node_count) {
  if (node_count <= 0) throw ContractViolation("topology needs at least one node");
  neighbors_.resize(static_cast<std::size_t>(node_count));
  delays_.resize(static_cast<std::size_t>(node_count));
}

void Topology::add_bidirectional(NodeId u, NodeId v, double delay) {
  if (!valid(u) || !valid(v)) {
    throw ContractViolation("node index out of range in link " + std::to_string(u) + "-" +
                            std::to_string(v));
  }
  if (u == v) throw ContractViolation("self-loop on node " + std::to_string(u));
  if (!(delay > 0.0) || !std::isfinite(delay)) {
    throw ContractViolation("transmission delay must be positive and finite");
  }
  if (has_link(u, v)) {
    throw ContractViolation("duplicate link " + std::to_string(u) + "-" + std::to_string(v));
  }
  auto insert = [this](NodeId from, NodeId to, double d) {
    auto& nb = neighbors_[from];
    auto pos = std::lower_bound(nb.begin(), nb.end(), to);
    auto offset = pos - nb.begin();
    nb.insert(pos, to);
    delays_[from].insert(delays_[from].begin() + offset, d);
  };
  insert(u, v, delay);
  insert(v, u, delay);
}

std::span<const NodeId> Topology::neighbors(NodeId i) const {
  if (!valid(i)) throw ContractViolation("node " + std::to_string(i) + " out of range");
  return neighbors_[i];
}

bool Topology::has_link(NodeId u, NodeId v) const {
  if (!valid(u) || !valid(v)) return false;
  return std::binary_search(neighbors_[u].begin(), neighbors_[u].end(), v);
}

double Topology::delay(NodeId u, NodeId v) const {
  if (valid(u)) {
    const auto& nb = neighbors_[u];
    auto pos = std::lower_bound(nb.begin(), nb.end(), v);
    if (pos != nb.end() && *pos == v) return delays_[u][pos - nb.begin()];
  }
  throw ContractViolation("no link " + std::to_string(u) + "->" + std::to_string(v));
}

std::size_t Topology::directed_link_count() const noexcept {
  std::size_t total = 0;
  for (const auto& nb : neighbors_) total += nb.size();
  return total;
}

bool Topology::connected() const {
  if (node_count() == 0) return true;
  // Links are always symmetric, so one BFS covers strong connectivity.
  auto hops = shortest_hops(*this, 0);
  return std::none_of(hops.begin(), hops.end(), [](int h) { return h == kUnreachable; });
}

std::vector<Link> Topology::undirected_links() const {
  std::vector<Link> out;
  for (NodeId u = 0; u < node_count(); ++u) {
    for (std::size_t k = 0; k < neighbors_[u].size(); ++k) {
      if (u < neighbors_[u][k]) out.push_back({u, neighbors_[u][k], delays_[u][k]});
    }
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

Topology load_topology(std::string_view text) {
  std::optional<Topology> topo;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto tokens = split_ws(line);
    if (!topo) {
      int n = 0;
      if (tokens.size() != 1 || !parse_number(tokens[0], n) || n <= 0) {
        throw ParseError("expected a positive node count", line_no);
      }
      topo.emplace(n);
      continue;
    }
    if (tokens.size() != 3) throw ParseError("expected `u v delay`", line_no);
    NodeId u = 0, v = 0;
    double g = 0.0;
    if (!parse_number(tokens[0], u) || !parse_number(tokens[1], v) || !parse_number(tokens[2], g)) {
      throw ParseError("malformed link", line_no);
    }
    try {
      topo->add_bidirectional(u, v, g);
    } catch (const ContractViolation& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!topo) throw ParseError("empty topology: missing node count", 0);
  return std::move(*topo);
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topology file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return load_topology(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

std::string to_text(const Topology& t) {
  std::ostringstream out;
  out << t.node_count() << '\n';
  for (const auto& link : t.undirected_links()) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, link.delay);
    out << link.u << ' ' << link.v << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
  }
  return out.str();
}

std::vector<NodeId> closed_neighborhood(const Topology& t, NodeId i) {
  auto nb = t.neighbors(i);
  std::vector<NodeId> out(nb.begin(), nb.end());
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return out;
}

std::vector<int> shortest_hops(const Topology& t, NodeId dst) {
  if (!t.valid(dst)) throw ContractViolation("destination out of range");
  std::vector<int> hops(static_cast<std::size_t>(t.node_count()), kUnreachable);
  std::deque<NodeId> frontier{dst};
  hops[dst] = 0;
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    // Links are symmetric: predecessors of v are its neighbors.
    for (NodeId u : t.neighbors(v)) {
      if (hops[u] == kUnreachable) {
        hops[u] = hops[v] + 1;
        frontier.push_back(u);
      }
    }
  }
  return hops;
}

ConsensusMatrix consensus_matrix(const Topology& t) {
  ConsensusMatrix w(t.node_count());
  for (NodeId i = 0; i < t.node_count(); ++i) {
    auto hood = closed_neighborhood(t, i);
    const double weight = 1.0 / static_cast<double>(hood.size());
    for (NodeId j : hood) w(i, j) = weight;
  }
  return w;
}

Topology grid_topology(int rows, int cols, std::span<const std::pair<NodeId, NodeId>> removed) {
  if (rows <= 0 || cols <= 0) throw ContractViolation("grid dimensions must be positive");
  auto is_removed = [&](NodeId a, NodeId b) {
    return std::any_of(removed.begin(), removed.end(), [&](const auto& p) {
      return (p.first == a && p.second == b) || (p.first == b && p.second == a);
    });
  };
  const int n = rows * cols;
  for (const auto& [a, b] : removed) {
    bool grid_edge = a >= 0 && b >= 0 && a < n && b < n &&
                     ((std::abs(a - b) == 1 && a / cols == b / cols) || std::abs(a - b) == cols);
    if (!grid_edge) {
      throw ContractViolation("(" + std::to_string(a) + "," + std::to_string(b) +
                              ") is not a grid edge");
    }
  }
  Topology t(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      NodeId id = r * cols + c;
      if (c + 1 < cols && !is_removed(id, id + 1)) t.add_bidirectional(id, id + 1, 1.0);
      if (r + 1 < rows && !is_removed(id, id + cols)) t.add_bidirectional(id, id + cols, 1.0);
    }
  }
  if (!t.connected()) throw ContractViolation("removed links disconnect the grid");
  return t;
}

}  // namespace gatroute
