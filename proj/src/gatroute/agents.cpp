// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/agents.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "gatroute/error.hpp"

namespace gatroute {

Transition to_transition(const DeliveryFeedback& fb) {
  Transition t;
  t.s = fb.state;
  t.a = fb.action;
  t.r = fb.reward;
  t.s_next = fb.next_state;
  t.f = fb.terminal;
  t.next_hop_target_value = fb.terminal ? 0.0 : fb.next_hop_target_value;
  return t;
}

// ---------------------------------------------------------------------------

ReplayMemory::ReplayMemory(std::size_t capacity, MemoryMode mode) : capacity_(capacity), mode_(mode) {
  if (capacity == 0) throw ContractViolation("replay memory capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1u << 16));
}

std::optional<std::vector<Transition>> ReplayMemory::store_and_sample(Transition t, std::size_t n,
                                                                      std::mt19937_64& rng) {
  if (n > capacity_) throw ContractViolation("batch size exceeds replay memory capacity");
  if (mode_ == MemoryMode::ring) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
    return std::nullopt;
  }
  items_.push_back(std::move(t));
  if (items_.size() < capacity_) return std::nullopt;
  // Partial Fisher-Yates: the first n slots become the batch.
  for (std::size_t k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, items_.size() - 1);
    std::swap(items_[k], items_[pick(rng)]);
  }
  std::vector<Transition> batch(std::make_move_iterator(items_.begin()),
                                std::make_move_iterator(items_.begin() + static_cast<std::ptrdiff_t>(n)));
  clear();
  return batch;
}

std::vector<Transition> ReplayMemory::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<Transition> out;
  out.reserve(std::min(n, items_.size()));
  std::sample(items_.begin(), items_.end(), std::back_inserter(out), n, rng);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> all_hop_tables(const Topology& t) {
  std::vector<std::vector<int>> tables;
  tables.reserve(static_cast<std::size_t>(t.node_count()));
  for (NodeId d = 0; d < t.node_count(); ++d) tables.push_back(shortest_hops(t, d));
  return tables;
}

NodeId shortest_path_act(const Observation& obs, const std::vector<std::vector<int>>& hop_tables) {
  const auto& hops = hop_tables.at(static_cast<std::size_t>(obs.destination));
  NodeId best = -1;
  for (NodeId y : obs.neighbors) {
    if (hops[y] == kUnreachable) continue;
    if (best < 0 || hops[y] < hops[best]) best = y;
  }
  if (best < 0) throw ContractViolation("destination " + std::to_string(obs.destination) + " unreachable");
  return best;
}

NodeId ShortestPathAgent::route(const Simulator& sim, const Packet& packet) {
  return shortest_path_act(sim.observation(packet), hops_);
}

// ---------------------------------------------------------------------------

NodeId global_routing_act(const Simulator& sim, const Packet& packet) {
  const Topology& t = sim.topology();
  const int n = t.node_count();
  const NodeId dst = packet.dst;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // cost[v]: expected time from the moment a packet lands at v until delivery.
  std::vector<double> cost(static_cast<std::size_t>(n), kInf);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  cost[dst] = 0.0;
  frontier.push({0.0, dst});
  while (!frontier.empty()) {
    auto [c, v] = frontier.top();
    frontier.pop();
    if (c > cost[v]) continue;
    for (NodeId u : t.neighbors(v)) {
      if (u == dst) continue;
      const double through = sim.estimated_queue_delay(u) + sim.service_time() + t.delay(u, v) + c;
      if (through < cost[u]) {
        cost[u] = through;
        frontier.push({through, u});
      }
    }
  }
  const NodeId here = packet.current_node;
  NodeId best = -1;
  double best_cost = kInf;
  for (NodeId y : t.neighbors(here)) {
    const double c = t.delay(here, y) + cost[y];
    if (c < best_cost - 1e-9) {
      best = y;
      best_cost = c;
    }
  }
  if (best < 0) throw ContractViolation("destination " + std::to_string(dst) + " unreachable");
  return best;
}

// ---------------------------------------------------------------------------

QTable::QTable(const Topology& t, double initial) : topology_(&t) {
  std::size_t offset = 0;
  const auto n = static_cast<std::size_t>(t.node_count());
  for (NodeId x = 0; x < t.node_count(); ++x) {
    row_start_.push_back(offset);
    offset += n * t.neighbors(x).size();
  }
  q_.assign(offset, initial);
}

std::size_t QTable::slot(NodeId x, NodeId d, NodeId y) const {
  const auto nb = topology_->neighbors(x);
  auto pos = std::lower_bound(nb.begin(), nb.end(), y);
  if (pos == nb.end() || *pos != y) {
    throw ContractViolation(std::to_string(y) + " is not a neighbor of " + std::to_string(x));
  }
  if (!topology_->valid(d)) throw ContractViolation("destination out of range");
  return row_start_[x] + static_cast<std::size_t>(d) * nb.size() + static_cast<std::size_t>(pos - nb.begin());
}

double& QTable::at(NodeId x, NodeId d, NodeId y) { return q_[slot(x, d, y)]; }
double QTable::at(NodeId x, NodeId d, NodeId y) const { return q_[slot(x, d, y)]; }

NodeId QTable::greedy(NodeId x, NodeId d) const {
  const auto nb = topology_->neighbors(x);
  if (nb.empty()) throw ContractViolation("node " + std::to_string(x) + " has no neighbors");
  const std::size_t base = row_start_[x] + static_cast<std::size_t>(d) * nb.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k < nb.size(); ++k) {
    if (q_[base + k] > q_[base + best]) best = k;
  }
  return nb[best];
}

double QTable::best(NodeId x, NodeId d) const { return at(x, d, greedy(x, d)); }

void qrouting_update(QTable& table, NodeId x, NodeId d, NodeId y, double q, double g, double next_value, double eta,
                     double gamma) {
  double& entry = table.at(x, d, y);
  entry += eta * (-(q + g) + gamma * next_value - entry);
}

QRoutingAgent::QRoutingAgent(const Topology& t, double eta, double gamma) : table_(t), eta_(eta), gamma_(gamma) {}

NodeId QRoutingAgent::route(const Simulator&, const Packet& packet) {
  return table_.greedy(packet.current_node, packet.dst);
}

void QRoutingAgent::learn(std::span<const DeliveryFeedback> feedback) {
  if (!learning_) return;
  for (const auto& fb : feedback) {
    const NodeId d = fb.state.destination;
    const double next = fb.terminal ? 0.0 : table_.best(fb.action, d);
    qrouting_update(table_, fb.sender, d, fb.action, fb.queue_delay, fb.transmission_delay, next, eta_, gamma_);
  }
}

// ---------------------------------------------------------------------------

NodeId dgatr_act(const QModel& model, const ParamSet& params, const Observation& obs) {
  if (obs.neighbors.empty()) throw ContractViolation("node " + std::to_string(obs.current) + " is isolated");
  auto q = model.q_values(params, encode(obs, model.nodes()));
  return select_action(q, obs.neighbors);
}

DeepAgent::DeepAgent(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp, std::uint64_t seed)
    : topology_(&t), model_(std::move(model)), hp_(hp), rng_(seed) {
  hp_.validate();
  if (model_->nodes() != t.node_count()) throw ContractViolation("model size does not match the topology");
}

std::vector<double> DeepAgent::q_values(const Observation& obs) const {
  return model_->q_values(acting_params(obs.current), encode(obs, model_->nodes()));
}

NodeId DeepAgent::act(const Observation& obs) {
  if (obs.neighbors.empty()) throw ContractViolation("node " + std::to_string(obs.current) + " is isolated");
  if (hp_.epsilon > 0.0 && learning_) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < hp_.epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, obs.neighbors.size() - 1);
      return obs.neighbors[pick(rng_)];
    }
  }
  return dgatr_act(*model_, acting_params(obs.current), obs);
}

double DeepAgent::target_value(const Observation& obs) const {
  auto q = model_->q_values(target_params(obs.current), encode(obs, model_->nodes()));
  return max_over(q, obs.neighbors);
}

NodeId DeepAgent::route(const Simulator& sim, const Packet& packet) { return act(sim.observation(packet)); }

double DeepAgent::next_hop_value(const Simulator&, const Observation& next_state) { return target_value(next_state); }

}  // namespace gatroute
