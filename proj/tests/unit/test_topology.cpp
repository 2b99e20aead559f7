// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <string>

#include "gatroute/error.hpp"
#include "gatroute/topology.hpp"
#include "oracles.hpp"

using namespace gatroute;

namespace {

std::vector<NodeId> ids(std::span<const NodeId> s) { return {s.begin(), s.end()}; }

std::string grid_text(int rows, int cols) { return to_text(grid_topology(rows, cols)); }

}  // namespace

TEST_CASE("parse: links are undirected and neighbors sorted") {
  auto t = load_topology("# sample\n4\n0 2 1.0\n0 1 2.5   # trailing comment\n\n2 3 1\n");
  CHECK(t.node_count() == 4);
  CHECK(ids(t.neighbors(0)) == std::vector<NodeId>{1, 2});
  CHECK(ids(t.neighbors(2)) == std::vector<NodeId>{0, 3});
  CHECK(t.delay(1, 0) == doctest::Approx(2.5));
  CHECK(t.directed_link_count() == 6);
}

TEST_CASE("parse: 6x6 file with node 0 linked to 1 and 6") {
  auto t = load_topology(grid_text(6, 6));
  CHECK(ids(t.neighbors(0)) == std::vector<NodeId>{1, 6});
}

TEST_CASE("parse: single node without links") {
  auto t = load_topology("1\n");
  CHECK(t.node_count() == 1);
  CHECK(t.neighbors(0).empty());
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const char* text) {
    try {
      load_topology(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("2\n0 0 1.0") == 2);        // self-loop
  CHECK(line_of("2\n0 5 1.0") == 2);        // out of range
  CHECK(line_of("2\n0 1 1.0\n1 0 1") == 3); // duplicate
  CHECK(line_of("2\n0 1 -1") == 2);         // non-positive delay
  CHECK(line_of("2\n0 1") == 2);            // missing delay
  CHECK(line_of("# nothing\n") == 0);       // no node count at all
  CHECK(line_of("x\n") == 1);
  CHECK(line_of("3\n0 1 1.0 extra") == 2);
}

TEST_CASE("to_text round-trips") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    auto t = oracle::random_connected(7, 5, rng);
    auto back = load_topology(to_text(t));
    CHECK(to_text(back) == to_text(t));
    for (int i = 0; i < t.node_count(); ++i) CHECK(ids(back.neighbors(i)) == ids(t.neighbors(i)));
  }
}

TEST_CASE("closed_neighborhood") {
  auto grid = grid_topology(6, 6);
  CHECK(closed_neighborhood(grid, 0) == std::vector<NodeId>{0, 1, 6});
  CHECK(closed_neighborhood(Topology(3), 2) == std::vector<NodeId>{2});
  Topology tri(3);
  tri.add_bidirectional(0, 1, 1);
  tri.add_bidirectional(1, 2, 1);
  tri.add_bidirectional(0, 2, 1);
  CHECK(closed_neighborhood(tri, 1) == std::vector<NodeId>{0, 1, 2});
  CHECK_THROWS_AS(closed_neighborhood(tri, 3), ContractViolation);
}

TEST_CASE("shortest_hops examples") {
  auto grid = grid_topology(6, 6);
  auto h = shortest_hops(grid, 35);
  CHECK(h[0] == 10);
  CHECK(h[35] == 0);
  Topology line(2);
  line.add_bidirectional(0, 1, 1);
  CHECK(shortest_hops(line, 1)[0] == 1);
  Topology split(3);
  split.add_bidirectional(0, 1, 1);
  CHECK(shortest_hops(split, 0)[2] == kUnreachable);
}

TEST_CASE("property: shortest_hops agrees with Floyd-Warshall and the triangle rule") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 9;
    auto t = oracle::random_connected(n, trial % 4, rng);
    auto all = oracle::floyd_hops(t);
    for (int d = 0; d < n; ++d) {
      auto h = shortest_hops(t, d);
      for (int u = 0; u < n; ++u) {
        CHECK(h[u] == all[u][d]);
        for (int v : t.neighbors(u)) CHECK(h[u] <= 1 + h[v]);
      }
    }
  }
}

TEST_CASE("property: neighborhoods are symmetric and contain the node") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = oracle::random_connected(8, 6, rng);
    for (int i = 0; i < 8; ++i) {
      auto hood = closed_neighborhood(t, i);
      CHECK(std::count(hood.begin(), hood.end(), i) == 1);
      for (int j : hood) {
        auto other = closed_neighborhood(t, j);
        CHECK(std::count(other.begin(), other.end(), i) == 1);
      }
    }
  }
}

TEST_CASE("consensus matrix") {
  auto grid = grid_topology(6, 6);
  auto w = consensus_matrix(grid);
  CHECK(w(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(w(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(w(0, 6) == doctest::Approx(1.0 / 3));
  for (int j = 0; j < 36; ++j)
    if (j != 0 && j != 1 && j != 6) CHECK(w(0, j) == 0.0);
  Topology lonely(2);
  CHECK(consensus_matrix(lonely)(1, 1) == 1.0);
  CHECK(consensus_matrix(lonely)(1, 0) == 0.0);
}

TEST_CASE("property: consensus rows sum to one and vanish off the neighborhood") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    auto t = oracle::random_connected(3 + trial % 10, trial % 5, rng);
    auto w = consensus_matrix(t);
    for (int i = 0; i < t.node_count(); ++i) {
      double sum = 0.0;
      auto hood = closed_neighborhood(t, i);
      for (int j = 0; j < t.node_count(); ++j) {
        sum += w(i, j);
        const bool inside = std::find(hood.begin(), hood.end(), j) != hood.end();
        if (inside) {
          CHECK(w(i, j) == doctest::Approx(1.0 / hood.size()));
        } else {
          CHECK(w(i, j) == 0.0);
        }
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("grid_topology") {
  auto g = grid_topology(6, 6);
  CHECK(g.node_count() == 36);
  CHECK(g.undirected_links().size() == 60);
  CHECK(ids(grid_topology(2, 2).neighbors(0)) == std::vector<NodeId>{1, 2});
  std::pair<NodeId, NodeId> cut[] = {{0, 1}};
  CHECK(ids(grid_topology(6, 6, cut).neighbors(0)) == std::vector<NodeId>{6});
  std::pair<NodeId, NodeId> bogus[] = {{0, 7}};
  CHECK_THROWS_AS(grid_topology(6, 6, bogus), ContractViolation);
  std::pair<NodeId, NodeId> isolate[] = {{0, 1}, {0, 6}};
  CHECK_THROWS(grid_topology(6, 6, isolate));
  CHECK_THROWS(grid_topology(0, 3));
}

TEST_CASE("sample irregular topology") {
  auto t = load_topology_file(std::string(GATROUTE_TEST_DATA) + "/irregular6x6.txt");
  CHECK(t.node_count() == 36);
  CHECK(t.connected());
  CHECK(ids(t.neighbors(0)) == std::vector<NodeId>{1, 6});
  CHECK(t.undirected_links().size() < 60);
}
