// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/simcore.hpp"

#include "gatroute/error.hpp"

namespace gatroute {

namespace {
// Arrival times are sums of the service time and link delays; allow for
// rounding when comparing them against the integral clock.
constexpr double kTimeSlack = 1e-9;
}  // namespace

void Metrics::record_delivery(const Packet& packet, double time) {
  const double delay = time - packet.birth_time;
  ++delivered_;
  delay_sum_ += delay;
  if (window_start_ && packet.birth_time >= *window_start_) {
    ++window_delivered_;
    window_delay_sum_ += delay;
  }
}

void Metrics::open_window(double start) {
  window_start_ = start;
  window_delivered_ = 0;
  window_delay_sum_ = 0.0;
}

std::optional<double> Metrics::average_delay() const {
  if (delivered_ == 0) return std::nullopt;
  return delay_sum_ / static_cast<double>(delivered_);
}

std::optional<double> Metrics::window_average_delay() const {
  if (window_delivered_ == 0) return std::nullopt;
  return window_delay_sum_ / static_cast<double>(window_delivered_);
}

double RoutingPolicy::next_hop_value(const Simulator&, const Observation&) { return 0.0; }

Simulator::Simulator(const Topology& topology, TrafficConfig traffic)
    : topology_(&topology), traffic_(traffic), rng_(traffic.seed), routers_(static_cast<std::size_t>(topology.node_count())) {
  if (!(traffic_.service_time > 0.0)) throw ContractViolation("service time must be positive");
  set_load(traffic.load);
}

void Simulator::set_load(double load) {
  if (!(load >= 0.0)) throw ContractViolation("load must be non-negative");
  if (load > 0.0 && topology_->node_count() < 2) throw ContractViolation("traffic needs at least two nodes");
  traffic_.load = load;
  if (load > 0.0) {
    arrivals_.emplace(load);
  } else {
    arrivals_.reset();
  }
}

std::uint64_t Simulator::inject(NodeId src, NodeId dst) {
  if (!topology_->valid(src) || !topology_->valid(dst) || src == dst) {
    throw ContractViolation("invalid packet endpoints");
  }
  Packet p;
  p.id = next_packet_id_++;
  p.src = src;
  p.dst = dst;
  p.birth_time = clock_;
  p.current_node = src;
  p.enqueue_time = clock_;
  routers_[src].queue.push_back(p);
  ++injected_;
  ++in_flight_;
  return p.id;
}

std::size_t Simulator::occupancy(NodeId node) const {
  const auto& r = routers_.at(static_cast<std::size_t>(node));
  return r.queue.size() + (r.busy_until > clock_ ? 1 : 0);
}

double Simulator::estimated_queue_delay(NodeId node) const {
  return static_cast<double>(occupancy(node)) * traffic_.service_time;
}

Observation Simulator::observation(const Packet& packet) const {
  return observe(*topology_, packet.current_node, packet.dst);
}

Simulator::AgeSummary Simulator::in_flight_ages(double since) const {
  AgeSummary s;
  auto visit = [&](const Packet& p) {
    if (p.birth_time >= since) {
      ++s.count;
      s.age_sum += clock_ - p.birth_time;
    }
  };
  for (const auto& r : routers_) {
    for (const auto& p : r.queue) visit(p);
  }
  // priority_queue hides its container; copy is fine at this call rate.
  auto pending = transit_;
  while (!pending.empty()) {
    visit(pending.top().packet);
    pending.pop();
  }
  return s;
}

std::vector<DeliveryFeedback> Simulator::step(RoutingPolicy& policy) {
  const int n = topology_->node_count();

  if (arrivals_) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int count = (*arrivals_)(rng_);
    for (int k = 0; k < count; ++k) {
      NodeId src = pick(rng_);
      NodeId dst = pick(rng_);
      while (dst == src) dst = pick(rng_);
      inject(src, dst);
    }
  }

  for (NodeId i = 0; i < n; ++i) {
    auto& router = routers_[i];
    if (router.queue.empty() || router.busy_until > clock_ + kTimeSlack) continue;
    Packet packet = router.queue.front();
    router.queue.pop_front();
    const NodeId next = policy.route(*this, packet);
    if (!topology_->has_link(i, next)) {
      throw ContractViolation("policy at node " + std::to_string(i) + " chose non-neighbor " + std::to_string(next));
    }
    const double q = estimated_queue_delay(next);
    const double g = topology_->delay(i, next);
    router.busy_until = clock_ + traffic_.service_time;
    Observation state = observe(*topology_, i, packet.dst);
    const double arrival = clock_ + traffic_.service_time + g;
    transit_.push(Transit{packet, i, next, std::move(state), -(q + g), q, g, arrival, next_seq_++});
  }

  clock_ += 1.0;

  std::vector<DeliveryFeedback> feedback;
  while (!transit_.empty() && transit_.top().arrival <= clock_ + kTimeSlack) {
    Transit t = transit_.top();
    transit_.pop();
    Packet& p = t.packet;
    ++p.hops;
    DeliveryFeedback fb;
    fb.sender = t.sender;
    fb.packet_id = p.id;
    fb.action = t.action;
    fb.reward = t.reward;
    fb.queue_delay = t.queue_delay;
    fb.transmission_delay = t.transmission_delay;
    fb.time = t.arrival;
    fb.next_state = observe(*topology_, t.action, p.dst);
    fb.state = std::move(t.state);
    if (t.action == p.dst) {
      fb.terminal = true;
      metrics_.record_delivery(p, t.arrival);
      --in_flight_;
    } else {
      p.current_node = t.action;
      p.enqueue_time = t.arrival;
      routers_[t.action].queue.push_back(p);
      fb.next_hop_target_value = policy.next_hop_value(*this, fb.next_state);
    }
    feedback.push_back(std::move(fb));
  }
  metrics_.sample_in_flight(in_flight_);
  return feedback;
}

}  // namespace gatroute
