// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gatroute/encoding.hpp"
#include "gatroute/qnet.hpp"
#include "gatroute/simcore.hpp"
#include "gatroute/topology.hpp"

namespace gatroute {

/// One experience tuple (s, a, r, s', f). a_next is the action logged at the
/// next hop, only present in pre-training data.
struct Transition {
  Observation s;
  NodeId a = 0;
  double r = 0.0;
  Observation s_next;
  bool f = false;
  std::optional<NodeId> a_next;
  double next_hop_target_value = 0.0;
};

Transition to_transition(const DeliveryFeedback& fb);

enum class MemoryMode {
  ring,            // overwrite the oldest entry, sample on demand
  fill_and_clear,  // hand out one batch when full, then empty
};

class ReplayMemory {
 public:
  ReplayMemory(std::size_t capacity, MemoryMode mode);

  /// Appends t. In fill-and-clear mode, once the memory holds `capacity`
  /// transitions a uniform batch of n (without replacement) is returned and
  /// the memory is emptied. Ring mode never returns a batch here.
  std::optional<std::vector<Transition>> store_and_sample(Transition t, std::size_t n, std::mt19937_64& rng);
  /// Uniform batch of min(n, size()) distinct transitions.
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  MemoryMode mode() const noexcept { return mode_; }
  const std::vector<Transition>& items() const noexcept { return items_; }
  void clear() { items_.clear(); head_ = 0; }

 private:
  std::size_t capacity_;
  MemoryMode mode_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // next slot to overwrite once the ring is full
};

/// A routing policy that may also learn from the feedback of its own
/// forwarding decisions.
class RoutingAgent : public RoutingPolicy {
 public:
  virtual std::string name() const = 0;
  /// Called once per simulation step with that step's feedback.
  virtual void learn(std::span<const DeliveryFeedback> feedback) { (void)feedback; }
  void set_learning(bool on) noexcept { learning_ = on; }
  bool learning() const noexcept { return learning_; }

 protected:
  bool learning_ = true;
};

// ---------------------------------------------------------------------------
// Shortest path

/// hop_tables[d][v] = hops from v to d.
std::vector<std::vector<int>> all_hop_tables(const Topology& t);

/// Neighbor with the fewest hops to the destination, ties to the smallest id.
NodeId shortest_path_act(const Observation& obs, const std::vector<std::vector<int>>& hop_tables);

class ShortestPathAgent final : public RoutingAgent {
 public:
  explicit ShortestPathAgent(const Topology& t) : hops_(all_hop_tables(t)) {}
  std::string name() const override { return "shortest"; }
  NodeId route(const Simulator& sim, const Packet& packet) override;

 private:
  std::vector<std::vector<int>> hops_;
};

// ---------------------------------------------------------------------------
// Global routing (queue-aware reference)

/// First hop of the cheapest path to packet.dst where entering an
/// intermediate router costs its current queue delay plus one service time
/// and each link costs its transmission delay. Recomputed per decision over
/// the live network state. A heuristic stand-in for an optimal online router.
NodeId global_routing_act(const Simulator& sim, const Packet& packet);

class GlobalRoutingAgent final : public RoutingAgent {
 public:
  std::string name() const override { return "global"; }
  NodeId route(const Simulator& sim, const Packet& packet) override { return global_routing_act(sim, packet); }
};

// ---------------------------------------------------------------------------
// Q-routing

/// Q[x][d][y] for every router x, destination d and neighbor y of x. Values
/// are negative delivery-time estimates.
class QTable {
 public:
  QTable(const Topology& t, double initial = 0.0);

  double& at(NodeId x, NodeId d, NodeId y);
  double at(NodeId x, NodeId d, NodeId y) const;
  /// max over neighbors y of Q[x][d][y]
  double best(NodeId x, NodeId d) const;
  NodeId greedy(NodeId x, NodeId d) const;
  const Topology& topology() const noexcept { return *topology_; }

 private:
  std::size_t slot(NodeId x, NodeId d, NodeId y) const;

  const Topology* topology_;
  std::vector<std::size_t> row_start_;  // per x, offset of the d = 0 block
  std::vector<double> q_;
};

/// Q[x][d][y] += eta * (-(q + g) + gamma * next_value - Q[x][d][y]), where
/// next_value is max_y' Q[y][d][y'] (0 on the terminal hop).
void qrouting_update(QTable& table, NodeId x, NodeId d, NodeId y, double q, double g, double next_value, double eta,
                     double gamma = 1.0);

class QRoutingAgent final : public RoutingAgent {
 public:
  QRoutingAgent(const Topology& t, double eta = 0.7, double gamma = 1.0);
  std::string name() const override { return "qrouting"; }
  NodeId route(const Simulator& sim, const Packet& packet) override;
  void learn(std::span<const DeliveryFeedback> feedback) override;

  const QTable& table() const noexcept { return table_; }
  QTable& table() noexcept { return table_; }

 private:
  QTable table_;
  double eta_;
  double gamma_;
};

// ---------------------------------------------------------------------------
// Neural learners (DGATR and DQN-routing)

/// Acting side shared by every training paradigm: encode the observation,
/// evaluate the router's current network and pick the greedy next hop.
class DeepAgent : public RoutingAgent {
 public:
  DeepAgent(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp, std::uint64_t seed);

  NodeId route(const Simulator& sim, const Packet& packet) override;
  double next_hop_value(const Simulator& sim, const Observation& next_state) override;

  /// Greedy (or epsilon-greedy) action of router obs.current.
  NodeId act(const Observation& obs);
  std::vector<double> q_values(const Observation& obs) const;
  /// max_a' Q(obs, a'; target of obs.current) over obs.neighbors.
  double target_value(const Observation& obs) const;

  virtual const ParamSet& acting_params(NodeId router) const = 0;
  virtual const ParamSet& target_params(NodeId router) const = 0;
  /// Installs the same main/target parameters on every router.
  virtual void load_params(const ParamSet& main, const ParamSet& target) = 0;

  const QModel& model() const noexcept { return *model_; }
  std::shared_ptr<const QModel> model_ptr() const noexcept { return model_; }
  const Hyperparams& hyperparams() const noexcept { return hp_; }
  const Topology& topology() const noexcept { return *topology_; }

 protected:
  const Topology* topology_;
  std::shared_ptr<const QModel> model_;
  Hyperparams hp_;
  std::mt19937_64 rng_;
};

/// encode -> forward -> greedy selection over the neighbors.
NodeId dgatr_act(const QModel& model, const ParamSet& params, const Observation& obs);

}  // namespace gatroute
