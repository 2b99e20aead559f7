// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gatroute/error.hpp"

namespace gatroute {

void Hyperparams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (!(step_size > 0.0)) throw ConfigError("step_size must be positive");
  if (gat_features <= 0 || hidden_units <= 0) throw ConfigError("layer sizes must be positive");
  if (!(leaky_slope > 0.0)) throw ConfigError("leaky_slope must be positive");
  if (batch_size <= 0 || memory_capacity <= 0) throw ConfigError("batch_size and memory_capacity must be positive");
  if (batch_size > memory_capacity) throw ConfigError("batch_size cannot exceed memory_capacity");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
}

double QModel::loss(const ParamSet& p, std::span<const BatchItem> batch) const {
  if (batch.empty()) throw ContractViolation("loss of an empty batch");
  double total = 0.0;
  for (const auto& item : batch) {
    const double err = item.target - q_values(p, item.x)[static_cast<std::size_t>(item.action)];
    total += err * err;
  }
  return total / static_cast<double>(batch.size());
}

Gradient QModel::backward(const ParamSet& p, std::span<const BatchItem> batch) const {
  Gradient g = zero_params();
  accumulate_gradient(p, batch, g);
  return g;
}

namespace {

void init_uniform(std::span<double> block, int fan_in, std::mt19937_64& rng) {
  const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-k, k);
  for (double& v : block) v = dist(rng);
}

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// GatQNet

GatQNet::GatQNet(const Topology& topology, int gat_features, int hidden_units, double leaky_slope)
    : nodes_(topology.node_count()), features_(gat_features), hidden_(hidden_units), slope_(leaky_slope) {
  if (features_ <= 0 || hidden_ <= 0) throw ContractViolation("layer sizes must be positive");
  hood_start_.push_back(0);
  for (NodeId i = 0; i < nodes_; ++i) {
    for (NodeId j : gatroute::closed_neighborhood(topology, i)) hood_.push_back(j);
    hood_start_.push_back(static_cast<int>(hood_.size()));
  }
  const int nh = nodes_ * features_;
  layout_template_ = ParamSet({{"gat_weight", features_, FeatureMatrix::kColumns},
                               {"attention_vec", 1, 2 * features_},
                               {"fc1_weight", hidden_, nh},
                               {"fc1_bias", 1, hidden_},
                               {"fc2_weight", nodes_, hidden_},
                               {"fc2_bias", 1, nodes_}});
  const auto& t = layout_template_;
  off_ = {t.block_info("gat_weight").offset, t.block_info("attention_vec").offset,
          t.block_info("fc1_weight").offset, t.block_info("fc1_bias").offset,
          t.block_info("fc2_weight").offset, t.block_info("fc2_bias").offset,
          t.size()};
}

ParamSet GatQNet::zero_params() const {
  ParamSet p = layout_template_;
  p.fill(0.0);
  return p;
}

ParamSet GatQNet::init_params(std::uint64_t seed) const {
  ParamSet p = zero_params();
  std::mt19937_64 rng(seed);
  init_uniform(p.block("gat_weight"), FeatureMatrix::kColumns, rng);
  init_uniform(p.block("attention_vec"), 2 * features_, rng);
  init_uniform(p.block("fc1_weight"), nodes_ * features_, rng);
  init_uniform(p.block("fc1_bias"), nodes_ * features_, rng);
  init_uniform(p.block("fc2_weight"), hidden_, rng);
  init_uniform(p.block("fc2_bias"), hidden_, rng);
  return p;
}

void GatQNet::check(const ParamSet& p) const {
  if (p.size() != off_.total) throw ContractViolation("parameter set does not match the DGATR shape");
}

std::span<const NodeId> GatQNet::closed_neighborhood(NodeId i) const {
  return std::span<const NodeId>(hood_).subspan(static_cast<std::size_t>(hood_start_[i]),
                                                static_cast<std::size_t>(hood_start_[i + 1] - hood_start_[i]));
}

double GatQNet::attention(const GatForwardCache& cache, NodeId i, NodeId j) const {
  for (int e = hood_start_[i]; e < hood_start_[i + 1]; ++e) {
    if (hood_[e] == j) return cache.alpha[e];
  }
  return 0.0;
}

GatForwardCache GatQNet::forward(const ParamSet& p, const FeatureMatrix& x) const {
  GatForwardCache c;
  forward(p, x, c);
  return c;
}

void GatQNet::forward(const ParamSet& p, const FeatureMatrix& x, GatForwardCache& c) const {
  check(p);
  if (x.nodes() != nodes_) throw ContractViolation("feature matrix has wrong node count");
  const auto w = p.values();
  const int H = features_;
  const std::size_t nh = static_cast<std::size_t>(nodes_) * H;

  c.h.assign(nh, 0.0);
  for (int i = 0; i < nodes_; ++i) {
    auto xi = x.row(i);
    if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) continue;
    for (int k = 0; k < H; ++k) {
      const double* wk = &w[off_.gat_weight + static_cast<std::size_t>(k) * 3];
      c.h[static_cast<std::size_t>(i) * H + k] = wk[0] * xi[0] + wk[1] * xi[1] + wk[2] * xi[2];
    }
  }

  const double* a_self = &w[off_.attention];
  const double* a_other = a_self + H;
  std::vector<double> s_self(static_cast<std::size_t>(nodes_)), s_other(static_cast<std::size_t>(nodes_));
  for (int i = 0; i < nodes_; ++i) {
    const double* hi = &c.h[static_cast<std::size_t>(i) * H];
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < H; ++k) {
      s1 += a_self[k] * hi[k];
      s2 += a_other[k] * hi[k];
    }
    s_self[i] = s1;
    s_other[i] = s2;
  }

  c.logits.resize(hood_.size());
  c.alpha.resize(hood_.size());
  c.z.assign(nh, 0.0);
  c.features.assign(nh, 0.0);
  c.active_rows.clear();
  for (int i = 0; i < nodes_; ++i) {
    const int b = hood_start_[i], e = hood_start_[i + 1];
    double top = -INFINITY;
    for (int k = b; k < e; ++k) {
      const double s = s_self[i] + s_other[hood_[k]];
      c.logits[k] = s;
      const double act = s > 0.0 ? s : slope_ * s;
      c.alpha[k] = act;
      top = std::max(top, act);
    }
    double norm = 0.0;
    for (int k = b; k < e; ++k) {
      c.alpha[k] = std::exp(c.alpha[k] - top);
      norm += c.alpha[k];
    }
    bool active = false;
    double* zi = &c.z[static_cast<std::size_t>(i) * H];
    for (int k = b; k < e; ++k) {
      c.alpha[k] /= norm;
      const double* hj = &c.h[static_cast<std::size_t>(hood_[k]) * H];
      for (int f = 0; f < H; ++f) zi[f] += c.alpha[k] * hj[f];
    }
    double* fi = &c.features[static_cast<std::size_t>(i) * H];
    for (int f = 0; f < H; ++f) {
      fi[f] = relu(zi[f]);
      active = active || fi[f] > 0.0;
    }
    if (active) c.active_rows.push_back(i);
  }

  c.fc1_pre.resize(static_cast<std::size_t>(hidden_));
  c.fc1_out.resize(static_cast<std::size_t>(hidden_));
  for (int k = 0; k < hidden_; ++k) {
    const double* wk = &w[off_.fc1_weight + static_cast<std::size_t>(k) * nh];
    double u = w[off_.fc1_bias + k];
    for (int i : c.active_rows) {
      const std::size_t base = static_cast<std::size_t>(i) * H;
      for (int f = 0; f < H; ++f) u += wk[base + f] * c.features[base + f];
    }
    c.fc1_pre[k] = u;
    c.fc1_out[k] = relu(u);
  }

  c.q.resize(static_cast<std::size_t>(nodes_));
  for (int a = 0; a < nodes_; ++a) {
    const double* wa = &w[off_.fc2_weight + static_cast<std::size_t>(a) * hidden_];
    double q = w[off_.fc2_bias + a];
    for (int k = 0; k < hidden_; ++k) q += wa[k] * c.fc1_out[k];
    c.q[a] = q;
  }
}

std::vector<double> GatQNet::q_values(const ParamSet& p, const FeatureMatrix& x) const {
  GatForwardCache c;
  forward(p, x, c);
  return std::move(c.q);
}

void GatQNet::backward_one(const ParamSet& p, const FeatureMatrix& x, const GatForwardCache& c, NodeId action,
                           double dq, std::span<double> g) const {
  const auto w = p.values();
  const int H = features_;
  const std::size_t nh = static_cast<std::size_t>(nodes_) * H;

  g[off_.fc2_bias + action] += dq;
  std::vector<double> du(static_cast<std::size_t>(hidden_));
  const double* w2 = &w[off_.fc2_weight + static_cast<std::size_t>(action) * hidden_];
  double* g2 = &g[off_.fc2_weight + static_cast<std::size_t>(action) * hidden_];
  for (int k = 0; k < hidden_; ++k) {
    g2[k] += dq * c.fc1_out[k];
    du[k] = c.fc1_pre[k] > 0.0 ? w2[k] * dq : 0.0;
  }

  std::vector<double> dz(nh, 0.0);
  for (int k = 0; k < hidden_; ++k) {
    if (du[k] == 0.0) continue;
    g[off_.fc1_bias + k] += du[k];
    const double* wk = &w[off_.fc1_weight + static_cast<std::size_t>(k) * nh];
    double* gk = &g[off_.fc1_weight + static_cast<std::size_t>(k) * nh];
    for (int i : c.active_rows) {
      const std::size_t base = static_cast<std::size_t>(i) * H;
      for (int f = 0; f < H; ++f) {
        gk[base + f] += du[k] * c.features[base + f];
        dz[base + f] += wk[base + f] * du[k];
      }
    }
  }
  for (std::size_t m = 0; m < nh; ++m) {
    if (!(c.z[m] > 0.0)) dz[m] = 0.0;
  }

  const double* a_self = &w[off_.attention];
  const double* a_other = a_self + H;
  double* ga_self = &g[off_.attention];
  double* ga_other = ga_self + H;
  std::vector<double> dh(nh, 0.0);
  std::vector<double> dalpha;
  for (int i : c.active_rows) {
    const int b = hood_start_[i], e = hood_start_[i + 1];
    const double* dzi = &dz[static_cast<std::size_t>(i) * H];
    const double* hi = &c.h[static_cast<std::size_t>(i) * H];
    dalpha.assign(static_cast<std::size_t>(e - b), 0.0);
    double weighted = 0.0;
    for (int k = b; k < e; ++k) {
      const std::size_t j = static_cast<std::size_t>(hood_[k]) * H;
      double d = 0.0;
      for (int f = 0; f < H; ++f) {
        dh[j + f] += c.alpha[k] * dzi[f];
        d += dzi[f] * c.h[j + f];
      }
      dalpha[k - b] = d;
      weighted += c.alpha[k] * d;
    }
    for (int k = b; k < e; ++k) {
      const double de = c.alpha[k] * (dalpha[k - b] - weighted);
      const double ds = de * (c.logits[k] > 0.0 ? 1.0 : slope_);
      if (ds == 0.0) continue;
      const std::size_t j = static_cast<std::size_t>(hood_[k]) * H;
      double* dhi = &dh[static_cast<std::size_t>(i) * H];
      for (int f = 0; f < H; ++f) {
        ga_self[f] += ds * hi[f];
        ga_other[f] += ds * c.h[j + f];
        dhi[f] += ds * a_self[f];
        dh[j + f] += ds * a_other[f];
      }
    }
  }

  double* gw = &g[off_.gat_weight];
  for (int i = 0; i < nodes_; ++i) {
    auto xi = x.row(i);
    if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) continue;
    const double* dhi = &dh[static_cast<std::size_t>(i) * H];
    for (int f = 0; f < H; ++f) {
      for (int col = 0; col < 3; ++col) gw[f * 3 + col] += dhi[f] * xi[col];
    }
  }
}

double GatQNet::accumulate_gradient(const ParamSet& p, std::span<const BatchItem> batch, Gradient& grad) const {
  if (batch.empty()) throw ContractViolation("gradient of an empty batch");
  check(p);
  check(grad);
  const double n = static_cast<double>(batch.size());
  double total = 0.0;
  GatForwardCache c;
  for (const auto& item : batch) {
    forward(p, item.x, c);
    const double err = item.target - c.q[static_cast<std::size_t>(item.action)];
    total += err * err;
    backward_one(p, item.x, c, item.action, -2.0 * err / n, grad.values());
  }
  return total / n;
}

// ---------------------------------------------------------------------------
// FcQNet

FcQNet::FcQNet(int nodes, int hidden1, int hidden2) : nodes_(nodes), hidden1_(hidden1), hidden2_(hidden2) {
  if (nodes <= 0 || hidden1 <= 0 || hidden2 <= 0) throw ContractViolation("layer sizes must be positive");
  const int in = nodes * FeatureMatrix::kColumns;
  layout_template_ = ParamSet({{"fc1_weight", hidden1_, in},
                               {"fc1_bias", 1, hidden1_},
                               {"fc2_weight", hidden2_, hidden1_},
                               {"fc2_bias", 1, hidden2_},
                               {"fc3_weight", nodes_, hidden2_},
                               {"fc3_bias", 1, nodes_}});
}

ParamSet FcQNet::zero_params() const {
  ParamSet p = layout_template_;
  p.fill(0.0);
  return p;
}

ParamSet FcQNet::init_params(std::uint64_t seed) const {
  ParamSet p = zero_params();
  std::mt19937_64 rng(seed);
  const int in = nodes_ * FeatureMatrix::kColumns;
  init_uniform(p.block("fc1_weight"), in, rng);
  init_uniform(p.block("fc1_bias"), in, rng);
  init_uniform(p.block("fc2_weight"), hidden1_, rng);
  init_uniform(p.block("fc2_bias"), hidden1_, rng);
  init_uniform(p.block("fc3_weight"), hidden2_, rng);
  init_uniform(p.block("fc3_bias"), hidden2_, rng);
  return p;
}

void FcQNet::forward(const ParamSet& p, const FeatureMatrix& x, Cache& c) const {
  if (p.size() != layout_template_.size()) throw ContractViolation("parameter set does not match the DQN shape");
  if (x.nodes() != nodes_) throw ContractViolation("feature matrix has wrong node count");
  const auto w1 = p.block("fc1_weight");
  const auto b1 = p.block("fc1_bias");
  const auto w2 = p.block("fc2_weight");
  const auto b2 = p.block("fc2_bias");
  const auto w3 = p.block("fc3_weight");
  const auto b3 = p.block("fc3_bias");
  const auto in = x.flat();

  c.active_inputs.clear();
  for (std::size_t m = 0; m < in.size(); ++m) {
    if (in[m] != 0.0) c.active_inputs.push_back(static_cast<int>(m));
  }
  c.pre1.resize(static_cast<std::size_t>(hidden1_));
  c.out1.resize(static_cast<std::size_t>(hidden1_));
  for (int k = 0; k < hidden1_; ++k) {
    double u = b1[k];
    for (int m : c.active_inputs) u += w1[static_cast<std::size_t>(k) * in.size() + m] * in[m];
    c.pre1[k] = u;
    c.out1[k] = relu(u);
  }
  c.pre2.resize(static_cast<std::size_t>(hidden2_));
  c.out2.resize(static_cast<std::size_t>(hidden2_));
  for (int k = 0; k < hidden2_; ++k) {
    double u = b2[k];
    for (int m = 0; m < hidden1_; ++m) u += w2[static_cast<std::size_t>(k) * hidden1_ + m] * c.out1[m];
    c.pre2[k] = u;
    c.out2[k] = relu(u);
  }
  c.q.resize(static_cast<std::size_t>(nodes_));
  for (int a = 0; a < nodes_; ++a) {
    double q = b3[a];
    for (int m = 0; m < hidden2_; ++m) q += w3[static_cast<std::size_t>(a) * hidden2_ + m] * c.out2[m];
    c.q[a] = q;
  }
}

std::vector<double> FcQNet::q_values(const ParamSet& p, const FeatureMatrix& x) const {
  Cache c;
  forward(p, x, c);
  return std::move(c.q);
}

double FcQNet::accumulate_gradient(const ParamSet& p, std::span<const BatchItem> batch, Gradient& grad) const {
  if (batch.empty()) throw ContractViolation("gradient of an empty batch");
  if (grad.size() != layout_template_.size()) throw ContractViolation("gradient does not match the DQN shape");
  const auto w2 = p.block("fc2_weight");
  const auto w3 = p.block("fc3_weight");
  auto g1 = grad.block("fc1_weight");
  auto gb1 = grad.block("fc1_bias");
  auto g2 = grad.block("fc2_weight");
  auto gb2 = grad.block("fc2_bias");
  auto g3 = grad.block("fc3_weight");
  auto gb3 = grad.block("fc3_bias");
  const std::size_t in_size = static_cast<std::size_t>(nodes_) * FeatureMatrix::kColumns;
  const double n = static_cast<double>(batch.size());
  double total = 0.0;
  Cache c;
  std::vector<double> d2(static_cast<std::size_t>(hidden2_)), d1(static_cast<std::size_t>(hidden1_));
  for (const auto& item : batch) {
    forward(p, item.x, c);
    const auto a = static_cast<std::size_t>(item.action);
    const double err = item.target - c.q[a];
    total += err * err;
    const double dq = -2.0 * err / n;
    gb3[a] += dq;
    for (int m = 0; m < hidden2_; ++m) {
      g3[a * hidden2_ + m] += dq * c.out2[m];
      d2[m] = c.pre2[m] > 0.0 ? w3[a * hidden2_ + m] * dq : 0.0;
    }
    std::fill(d1.begin(), d1.end(), 0.0);
    for (int k = 0; k < hidden2_; ++k) {
      if (d2[k] == 0.0) continue;
      gb2[k] += d2[k];
      for (int m = 0; m < hidden1_; ++m) {
        g2[static_cast<std::size_t>(k) * hidden1_ + m] += d2[k] * c.out1[m];
        d1[m] += w2[static_cast<std::size_t>(k) * hidden1_ + m] * d2[k];
      }
    }
    const auto in = item.x.flat();
    for (int k = 0; k < hidden1_; ++k) {
      if (!(c.pre1[k] > 0.0) || d1[k] == 0.0) continue;
      gb1[k] += d1[k];
      for (int m : c.active_inputs) g1[static_cast<std::size_t>(k) * in_size + m] += d1[k] * in[m];
    }
  }
  return total / n;
}

// ---------------------------------------------------------------------------

NodeId select_action(std::span<const double> q, std::span<const NodeId> allowed) {
  if (allowed.empty()) throw ContractViolation("no allowed action: node has no neighbors");
  NodeId best = -1;
  double best_q = 0.0;
  for (NodeId a : allowed) {
    const double v = q[static_cast<std::size_t>(a)];
    if (best < 0 || v > best_q || (v == best_q && a < best)) {
      best = a;
      best_q = v;
    }
  }
  return best;
}

double max_over(std::span<const double> q, std::span<const NodeId> allowed) {
  return q[static_cast<std::size_t>(select_action(q, allowed))];
}

}  // namespace gatroute
