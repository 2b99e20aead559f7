// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "gatroute/encoding.hpp"
#include "gatroute/topology.hpp"

namespace gatroute {

struct Packet {
  std::uint64_t id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double birth_time = 0.0;
  NodeId current_node = 0;
  double enqueue_time = 0.0;  // when it joined the queue of current_node
  int hops = 0;
};

struct RouterState {
  std::deque<Packet> queue;
  double busy_until = 0.0;
};

struct TrafficConfig {
  double load = 0.0;          // mean packets injected per time unit
  std::uint64_t seed = 1;
  double service_time = 1.0;  // time a router spends on one packet
};

/// Returned to the sending router when its packet reaches the next hop.
struct DeliveryFeedback {
  NodeId sender = 0;
  std::uint64_t packet_id = 0;
  Observation state;
  NodeId action = 0;
  double reward = 0.0;  // -(queue_delay + transmission_delay)
  Observation next_state;
  bool terminal = false;  // action was the packet's destination
  /// max over the next hop's allowed actions of its target Q-value; zero on
  /// terminal transitions.
  double next_hop_target_value = 0.0;
  double queue_delay = 0.0;
  double transmission_delay = 0.0;
  double time = 0.0;
};

/// Delivery statistics. The measurement window only counts packets born at or
/// after its start.
class Metrics {
 public:
  void record_delivery(const Packet& packet, double time);
  void open_window(double start);

  std::uint64_t delivered_count() const noexcept { return delivered_; }
  double delay_sum() const noexcept { return delay_sum_; }
  std::optional<double> average_delay() const;

  std::optional<double> window_start() const noexcept { return window_start_; }
  std::uint64_t window_delivered() const noexcept { return window_delivered_; }
  double window_delay_sum() const noexcept { return window_delay_sum_; }
  std::optional<double> window_average_delay() const;

  /// In-flight packet count sampled at the end of every step.
  const std::vector<std::size_t>& in_flight_trace() const noexcept { return in_flight_trace_; }
  void sample_in_flight(std::size_t count) { in_flight_trace_.push_back(count); }

 private:
  std::uint64_t delivered_ = 0;
  double delay_sum_ = 0.0;
  std::optional<double> window_start_;
  std::uint64_t window_delivered_ = 0;
  double window_delay_sum_ = 0.0;
  std::vector<std::size_t> in_flight_trace_;
};

class Simulator;

/// Routing decision maker for every router of a network.
class RoutingPolicy {
 public:
  virtual ~RoutingPolicy() = default;

  /// Next hop for the packet at the head of packet.current_node's queue.
  /// Must return a neighbor of that node.
  virtual NodeId route(const Simulator& sim, const Packet& packet) = 0;

  /// Value the router next_state.current reports back to the sender,
  /// max_a Q(next_state, a) under its target network.
  virtual double next_hop_value(const Simulator& sim, const Observation& next_state);
};

/// Discrete-time packet network. Each step injects Poisson traffic, lets every
/// idle router forward its head-of-line packet, advances the clock by one unit
/// and then lands the packets whose transmission has finished.
class Simulator {
 public:
  Simulator(const Topology& topology, TrafficConfig traffic);

  std::vector<DeliveryFeedback> step(RoutingPolicy& policy);

  /// Places a packet at the tail of src's queue, born now.
  std::uint64_t inject(NodeId src, NodeId dst);
  void set_load(double load);
  double load() const noexcept { return traffic_.load; }

  double now() const noexcept { return clock_; }
  double service_time() const noexcept { return traffic_.service_time; }
  const Topology& topology() const noexcept { return *topology_; }
  const RouterState& router(NodeId i) const { return routers_.at(static_cast<std::size_t>(i)); }

  /// Packets queued or in service at node, times the service time.
  double estimated_queue_delay(NodeId node) const;
  std::size_t occupancy(NodeId node) const;

  Observation observation(const Packet& packet) const;

  std::uint64_t injected_count() const noexcept { return injected_; }
  std::size_t in_flight() const noexcept { return in_flight_; }
  Metrics& metrics() noexcept { return metrics_; }
  const Metrics& metrics() const noexcept { return metrics_; }

  /// Ages at now() of undelivered packets born at or after `since`.
  struct AgeSummary {
    std::size_t count = 0;
    double age_sum = 0.0;
  };
  AgeSummary in_flight_ages(double since) const;

 private:
  struct Transit {
    Packet packet;
    NodeId sender;
    NodeId action;
    Observation state;
    double reward;
    double queue_delay;
    double transmission_delay;
    double arrival;
    std::uint64_t seq;
  };
  struct LaterArrival {
    bool operator()(const Transit& a, const Transit& b) const {
      return a.arrival != b.arrival ? a.arrival > b.arrival : a.seq > b.seq;
    }
  };

  const Topology* topology_;
  TrafficConfig traffic_;
  std::mt19937_64 rng_;
  std::optional<std::poisson_distribution<int>> arrivals_;
  double clock_ = 0.0;
  std::vector<RouterState> routers_;
  std::priority_queue<Transit, std::vector<Transit>, LaterArrival> transit_;
  std::uint64_t next_packet_id_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t injected_ = 0;
  std::size_t in_flight_ = 0;
  Metrics metrics_;
};

}  // namespace gatroute
