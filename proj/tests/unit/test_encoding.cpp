// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "gatroute/encoding.hpp"
#include "gatroute/error.hpp"
#include "oracles.hpp"

using namespace gatroute;

TEST_CASE("encode: packet at node 0 heading for 35") {
  auto x = encode(Observation{0, {1, 6}, 35}, 36);
  auto row = [&](int r) { return std::vector<double>(x.row(r).begin(), x.row(r).end()); };
  CHECK(row(0) == std::vector<double>{1, 0, 0});
  CHECK(row(1) == std::vector<double>{0, 1, 0});
  CHECK(row(6) == std::vector<double>{0, 1, 0});
  CHECK(row(35) == std::vector<double>{0, 0, 1});
  for (int r = 0; r < 36; ++r) {
    if (r == 0 || r == 1 || r == 6 || r == 35) continue;
    CHECK(row(r) == std::vector<double>{0, 0, 0});
  }
}

TEST_CASE("encode: destination that is also a neighbor carries both bits") {
  auto x = encode(Observation{0, {1}, 1}, 2);
  CHECK(x(0, 0) == 1);
  CHECK(x(0, 1) == 0);
  CHECK(x(0, 2) == 0);
  CHECK(x(1, 0) == 0);
  CHECK(x(1, 1) == 1);
  CHECK(x(1, 2) == 1);
}

TEST_CASE("encode rejects out-of-range ids") {
  CHECK_THROWS_AS(encode(Observation{0, {1}, 5}, 3), ContractViolation);
  CHECK_THROWS_AS(encode(Observation{0, {-1}, 2}, 3), ContractViolation);
}

TEST_CASE("observe lists sorted neighbors without the current node") {
  auto g = grid_topology(3, 3);
  auto obs = observe(g, 4, 8);
  CHECK(obs.current == 4);
  CHECK(obs.neighbors == std::vector<NodeId>{1, 3, 5, 7});
  CHECK(obs.destination == 8);
}

TEST_CASE("property: encode is pure and column sums are (1, |neighbors|, 1)") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = oracle::random_connected(2 + trial % 12, trial % 5, rng);
    const int n = t.node_count();
    const NodeId cur = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const NodeId dst = std::uniform_int_distribution<int>(0, n - 1)(rng);
    auto obs = observe(t, cur, dst);
    auto a = encode(obs, n);
    auto b = encode(observe(t, cur, dst), n);
    CHECK(a == b);
    double sums[3] = {0, 0, 0};
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < 3; ++c) sums[c] += a(r, c);
    CHECK(sums[0] == 1);
    CHECK(sums[1] == static_cast<double>(obs.neighbors.size()));
    CHECK(sums[2] == 1);
  }
}
