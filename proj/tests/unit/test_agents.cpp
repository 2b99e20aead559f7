// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "gatroute/agents.hpp"
#include "gatroute/error.hpp"
#include "gatroute/paradigms.hpp"
#include "oracles.hpp"

using namespace gatroute;

namespace {

Transition tagged(int k) {
  Transition t;
  t.a = k;
  return t;
}

Packet packet_at(NodeId at, NodeId dst) {
  Packet p;
  p.src = at;
  p.current_node = at;
  p.dst = dst;
  return p;
}

Topology line(int n) {
  Topology t(n);
  for (int i = 0; i + 1 < n; ++i) t.add_bidirectional(i, i + 1, 1.0);
  return t;
}

}  // namespace

TEST_CASE("fill-and-clear memory hands out one batch when full") {
  ReplayMemory m(4, MemoryMode::fill_and_clear);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 3; ++k) CHECK_FALSE(m.store_and_sample(tagged(k), 2, rng));
  CHECK(m.size() == 3);
  auto batch = m.store_and_sample(tagged(3), 2, rng);
  REQUIRE(batch);
  CHECK(batch->size() == 2);
  CHECK((*batch)[0].a != (*batch)[1].a);  // drawn without replacement
  CHECK(m.size() == 0);
  CHECK_THROWS_AS(m.store_and_sample(tagged(9), 5, rng), ContractViolation);
}

TEST_CASE("ring memory evicts the oldest entry") {
  ReplayMemory m(2, MemoryMode::ring);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 3; ++k) CHECK_FALSE(m.store_and_sample(tagged(k), 1, rng));
  CHECK(m.size() == 2);
  std::vector<int> held;
  for (const auto& t : m.items()) held.push_back(t.a);
  std::sort(held.begin(), held.end());
  CHECK(held == std::vector<int>{1, 2});
  CHECK(m.sample(2, rng).size() == 2);
}

TEST_CASE("shortest path examples") {
  auto grid = grid_topology(6, 6);
  auto tables = all_hop_tables(grid);
  CHECK(shortest_path_act(observe(grid, 0, 35), tables) == 1);
  CHECK(shortest_path_act(observe(grid, 0, 6), tables) == 6);
  auto l = line(4);
  auto lt = all_hop_tables(l);
  CHECK(shortest_path_act(observe(l, 2, 0), lt) == 1);
  CHECK(shortest_path_act(observe(l, 1, 3), lt) == 2);
}

TEST_CASE("property: shortest path moves one hop closer (Floyd-Warshall oracle)") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = oracle::random_connected(3 + trial % 8, trial % 4, rng);
    auto all = oracle::floyd_hops(t);
    auto tables = all_hop_tables(t);
    for (int x = 0; x < t.node_count(); ++x)
      for (int d = 0; d < t.node_count(); ++d) {
        if (x == d) continue;
        const NodeId y = shortest_path_act(observe(t, x, d), tables);
        CHECK(t.has_link(x, y));
        CHECK(all[y][d] == all[x][d] - 1);
        for (NodeId z : t.neighbors(x))
          if (all[z][d] == all[x][d] - 1) CHECK(y <= z);  // smallest id among ties
      }
  }
}

TEST_CASE("global routing with empty queues equals shortest path on unit delays") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = oracle::random_connected(4 + trial % 7, trial % 4, rng);
    Simulator sim(t, {0.0, 1, 1.0});
    auto tables = all_hop_tables(t);
    for (int x = 0; x < t.node_count(); ++x)
      for (int d = 0; d < t.node_count(); ++d)
        if (x != d) CHECK(global_routing_act(sim, packet_at(x, d)) == shortest_path_act(observe(t, x, d), tables));
  }
}

TEST_CASE("global routing avoids the congested one of two equal paths") {
  // 0-1-3 and 0-2-3; load router 1.
  Topology t(4);
  t.add_bidirectional(0, 1, 1);
  t.add_bidirectional(0, 2, 1);
  t.add_bidirectional(1, 3, 1);
  t.add_bidirectional(2, 3, 1);
  Simulator sim(t, {0.0, 1, 1.0});
  CHECK(global_routing_act(sim, packet_at(0, 3)) == 1);
  for (int k = 0; k < 3; ++k) sim.inject(1, 0);
  CHECK(global_routing_act(sim, packet_at(0, 3)) == 2);
  // A line has a single path no matter the congestion.
  auto l = line(3);
  Simulator busy(l, {0.0, 1, 1.0});
  for (int k = 0; k < 5; ++k) busy.inject(1, 0);
  CHECK(global_routing_act(busy, packet_at(0, 2)) == 1);
}

TEST_CASE("property: global routing follows a queue-weighted Dijkstra oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    auto t = oracle::random_connected(6, 5, rng);
    Simulator sim(t, {0.0, 1, 1.0});
    for (int k = 0; k < 12; ++k) {
      NodeId a = std::uniform_int_distribution<int>(0, 5)(rng);
      NodeId b = (a + 1 + std::uniform_int_distribution<int>(0, 4)(rng)) % 6;
      sim.inject(a, b);
    }
    std::vector<double> node_cost(6);
    for (int v = 0; v < 6; ++v) node_cost[v] = sim.estimated_queue_delay(v) + sim.service_time();
    for (int x = 0; x < 6; ++x)
      for (int d = 0; d < 6; ++d) {
        if (x == d) continue;
        auto dist = oracle::dijkstra_to(t, d, node_cost);
        double best = INFINITY;
        for (NodeId y : t.neighbors(x)) best = std::min(best, t.delay(x, y) + dist[y]);
        const NodeId chosen = global_routing_act(sim, packet_at(x, d));
        CHECK(t.delay(x, chosen) + dist[chosen] == doctest::Approx(best));
      }
  }
}

TEST_CASE("qrouting_update examples") {
  auto t = line(2);
  QTable q(t);
  qrouting_update(q, 0, 1, 1, 0.0, 1.0, 0.0, 1.0);
  CHECK(q.at(0, 1, 1) == -1.0);
  auto before = q.at(0, 1, 1);
  qrouting_update(q, 0, 1, 1, 5.0, 1.0, -3.0, 0.0);
  CHECK(q.at(0, 1, 1) == before);
  CHECK_THROWS_AS(qrouting_update(q, 0, 1, 0, 0, 1, 0, 1), ContractViolation);
}

TEST_CASE("property: zero-traffic Q-routing reaches the value-iteration fixed point") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    auto t = trial == 0 ? line(3) : oracle::random_connected(3 + trial, trial % 3, rng);
    const int n = t.node_count();
    auto expected = oracle::value_iteration(t);
    QTable q(t);
    for (int sweep = 0; sweep < 200; ++sweep)
      for (int x = 0; x < n; ++x)
        for (int d = 0; d < n; ++d) {
          if (x == d) continue;
          for (int y : t.neighbors(x)) {
            const double next = y == d ? 0.0 : q.best(y, d);
            qrouting_update(q, x, d, y, 0.0, t.delay(x, y), next, 0.7);
          }
        }
    auto hops = oracle::floyd_hops(t);
    for (int x = 0; x < n; ++x)
      for (int d = 0; d < n; ++d) {
        if (x == d) continue;
        for (int y : t.neighbors(x)) {
          CHECK(std::abs(q.at(x, d, y) - expected[x][d][y]) < 1e-3);
          CHECK(std::abs(q.at(x, d, y) + 1 + hops[y][d]) < 1e-3);
        }
      }
  }
}

TEST_CASE("Q-routing agent learns hop-optimal routes from lone packets") {
  auto t = grid_topology(3, 3);
  QRoutingAgent agent(t);
  Simulator sim(t, {0.0, 1, 1.0});
  for (int round = 0; round < 60; ++round)
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b) {
        if (a == b) continue;
        sim.inject(a, b);
        for (int k = 0; k < 1000 && sim.in_flight() > 0; ++k) agent.learn(sim.step(agent));
        REQUIRE(sim.in_flight() == 0);
      }
  auto hops = oracle::floyd_hops(t);
  for (int x = 0; x < 9; ++x)
    for (int d = 0; d < 9; ++d)
      if (x != d) CHECK(hops[agent.table().greedy(x, d)][d] == hops[x][d] - 1);
}

TEST_CASE("dgatr_act: singleton neighbor, determinism, isolated node") {
  auto l = line(2);
  GatQNet net(l, 4, 8, 0.2);
  auto p = net.init_params(3);
  CHECK(dgatr_act(net, p, observe(l, 0, 1)) == 1);
  auto g = grid_topology(3, 3);
  GatQNet gn(g, 4, 8, 0.2);
  auto gp = gn.init_params(5);
  const auto first = dgatr_act(gn, gp, observe(g, 4, 0));
  CHECK(dgatr_act(gn, gp, observe(g, 4, 0)) == first);
  Topology lonely(2);
  GatQNet ln(lonely, 2, 2, 0.2);
  CHECK_THROWS_AS(dgatr_act(ln, ln.init_params(1), observe(lonely, 0, 1)), ContractViolation);
}

TEST_CASE("dqn: zero parameters give constant Q and the smallest-id action") {
  auto g = grid_topology(3, 3);
  FcQNet net(9, 8, 8);
  auto p = net.zero_params();
  auto q = net.q_values(p, encode(observe(g, 4, 0), 9));
  for (double v : q) CHECK(v == 0.0);
  CHECK(dgatr_act(net, p, observe(g, 4, 0)) == 1);
  auto l = line(2);
  FcQNet ln(2, 4, 4);
  CHECK(dgatr_act(ln, ln.init_params(2), observe(l, 0, 1)) == 1);
}

TEST_CASE("property: every agent picks a neighbor") {
  auto t = grid_topology(4, 4);
  auto model = std::make_shared<GatQNet>(t, 4, 8, 0.2);
  Hyperparams hp;
  hp.epsilon = 0.3;
  std::vector<std::unique_ptr<RoutingAgent>> agents;
  agents.push_back(std::make_unique<ShortestPathAgent>(t));
  agents.push_back(std::make_unique<GlobalRoutingAgent>());
  agents.push_back(std::make_unique<QRoutingAgent>(t));
  agents.push_back(std::make_unique<CentralizedLearner>(t, model, hp, 1));
  for (auto& agent : agents) {
    Simulator sim(t, {2.0, 3, 1.0});
    // Simulator::step throws on a non-neighbor choice.
    CHECK_NOTHROW(for (int k = 0; k < 300; ++k) agent->learn(sim.step(*agent)));
  }
}

TEST_CASE("to_transition copies the feedback") {
  DeliveryFeedback fb;
  fb.sender = 2;
  fb.action = 3;
  fb.reward = -4;
  fb.terminal = true;
  fb.next_hop_target_value = -7;
  fb.state = Observation{2, {1, 3}, 3};
  fb.next_state = Observation{3, {2}, 3};
  auto t = to_transition(fb);
  CHECK(t.s == fb.state);
  CHECK(t.a == 3);
  CHECK(t.r == -4);
  CHECK(t.s_next == fb.next_state);
  CHECK(t.f);
  CHECK(t.next_hop_target_value == 0);  // nothing to bootstrap from after delivery
  CHECK_FALSE(t.a_next);
  fb.terminal = false;
  CHECK(to_transition(fb).next_hop_target_value == -7);
}
