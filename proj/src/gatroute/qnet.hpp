// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "gatroute/encoding.hpp"
#include "gatroute/params.hpp"
#include "gatroute/topology.hpp"

namespace gatroute {

struct Hyperparams {
  double gamma = 1.0;
  double step_size = 1e-3;
  double tau = 0.05;
  int gat_features = 16;
  int hidden_units = 128;
  double leaky_slope = 0.2;
  int batch_size = 16;
  int memory_capacity = 32;  // per-agent memory M for federated / cooperated
  double epsilon = 0.0;      // exploration; 0 is purely greedy

  void validate() const;
};

/// One regression example: push Q(x, action) towards target.
struct BatchItem {
  FeatureMatrix x;
  NodeId action = 0;
  double target = 0.0;
};

/// A Q-function over the N-node action space with an exact gradient of the
/// mean squared TD error.
class QModel {
 public:
  virtual ~QModel() = default;

  virtual std::string_view kind() const = 0;
  virtual int nodes() const = 0;
  virtual ParamSet zero_params() const = 0;
  /// Uniform in [-k, k], k = 1/sqrt(fan-in) of the owning layer.
  virtual ParamSet init_params(std::uint64_t seed) const = 0;
  virtual std::vector<double> q_values(const ParamSet& p, const FeatureMatrix& x) const = 0;
  /// Adds the gradient of (1/n) sum_j (y_j - Q(x_j, a_j))^2 to grad and
  /// returns the loss.
  virtual double accumulate_gradient(const ParamSet& p, std::span<const BatchItem> batch, Gradient& grad) const = 0;

  double loss(const ParamSet& p, std::span<const BatchItem> batch) const;
  Gradient backward(const ParamSet& p, std::span<const BatchItem> batch) const;
};

/// Intermediates of one DGATR forward pass. Per-edge arrays follow the
/// model's closed-neighborhood ordering.
struct GatForwardCache {
  std::vector<double> h;         // N x H, h_i = W x_i
  std::vector<double> logits;    // a^T [h_i || h_j] per edge, before LeakyReLU
  std::vector<double> alpha;     // attention per edge
  std::vector<double> z;         // N x H aggregated, before ReLU
  std::vector<double> features;  // N x H, ReLU(z)
  std::vector<int> active_rows;  // rows of features with a nonzero entry
  std::vector<double> fc1_pre;
  std::vector<double> fc1_out;
  std::vector<double> q;
};

/// Graph attention layer (single head) followed by two fully connected
/// layers. All N output feature rows are flattened into the FC input.
class GatQNet final : public QModel {
 public:
  GatQNet(const Topology& topology, int gat_features, int hidden_units, double leaky_slope);

  std::string_view kind() const override { return "dgatr"; }
  int nodes() const override { return nodes_; }
  int gat_features() const noexcept { return features_; }
  int hidden_units() const noexcept { return hidden_; }
  ParamSet zero_params() const override;
  ParamSet init_params(std::uint64_t seed) const override;
  std::vector<double> q_values(const ParamSet& p, const FeatureMatrix& x) const override;
  double accumulate_gradient(const ParamSet& p, std::span<const BatchItem> batch, Gradient& grad) const override;

  void forward(const ParamSet& p, const FeatureMatrix& x, GatForwardCache& cache) const;
  GatForwardCache forward(const ParamSet& p, const FeatureMatrix& x) const;

  /// alpha_ij from a cache; zero when j is outside the closed neighborhood of i.
  double attention(const GatForwardCache& cache, NodeId i, NodeId j) const;
  std::span<const NodeId> closed_neighborhood(NodeId i) const;

 private:
  struct Offsets {
    std::size_t gat_weight, attention, fc1_weight, fc1_bias, fc2_weight, fc2_bias, total;
  };
  void check(const ParamSet& p) const;
  void backward_one(const ParamSet& p, const FeatureMatrix& x, const GatForwardCache& c, NodeId action, double dq,
                    std::span<double> g) const;

  int nodes_;
  int features_;
  int hidden_;
  double slope_;
  std::vector<int> hood_start_;  // CSR over closed neighborhoods
  std::vector<NodeId> hood_;
  Offsets off_{};
  ParamSet layout_template_;
};

/// Fully connected Q-network used by the DQN-routing baseline: flattened 3N
/// indicator input, two ReLU hidden layers, N outputs.
class FcQNet final : public QModel {
 public:
  FcQNet(int nodes, int hidden1, int hidden2);

  std::string_view kind() const override { return "dqn"; }
  int nodes() const override { return nodes_; }
  ParamSet zero_params() const override;
  ParamSet init_params(std::uint64_t seed) const override;
  std::vector<double> q_values(const ParamSet& p, const FeatureMatrix& x) const override;
  double accumulate_gradient(const ParamSet& p, std::span<const BatchItem> batch, Gradient& grad) const override;

 private:
  struct Cache {
    std::vector<int> active_inputs;
    std::vector<double> pre1, out1, pre2, out2, q;
  };
  void forward(const ParamSet& p, const FeatureMatrix& x, Cache& c) const;

  int nodes_;
  int hidden1_;
  int hidden2_;
  ParamSet layout_template_;
};

/// Greedy action: argmax of q over `allowed`, ties to the smallest id.
NodeId select_action(std::span<const double> q, std::span<const NodeId> allowed);
/// max of q over `allowed` (which must be nonempty).
double max_over(std::span<const double> q, std::span<const NodeId> allowed);

/// r + gamma * next_max_q * (1 - f)
inline double td_target(double reward, double next_max_q, bool terminal, double gamma) {
  return terminal ? reward : reward + gamma * next_max_q;
}

}  // namespace gatroute
