// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatroute/agents.hpp"
#include "gatroute/params.hpp"
#include "gatroute/qnet.hpp"

namespace gatroute {

enum class Paradigm { centralized, federated, cooperated };

std::string_view to_string(Paradigm p);
Paradigm parse_paradigm(std::string_view s);

/// Builds a batch of regression examples for one router's network update.
/// Targets come from `target_of` for each transition.
template <class TargetFn>
std::vector<BatchItem> make_batch(const QModel& model, std::span<const Transition> transitions, TargetFn target_of) {
  std::vector<BatchItem> batch;
  batch.reserve(transitions.size());
  for (const auto& t : transitions) {
    batch.push_back(BatchItem{encode(t.s, model.nodes()), t.a, target_of(t)});
  }
  return batch;
}

struct CentralizedOptions {
  std::size_t memory_capacity = 10000;
  int train_period = 4;  // steps between gradient updates
};

/// One shared network trained on the pooled experience of every router.
class CentralizedLearner final : public DeepAgent {
 public:
  CentralizedLearner(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp, std::uint64_t seed,
                     CentralizedOptions options = {});

  std::string name() const override;
  void learn(std::span<const DeliveryFeedback> feedback) override;
  /// Stores the transitions and, every train_period calls, applies one
  /// gradient step on a sampled batch followed by the soft target update.
  void centralized_step(std::span<const Transition> transitions);
  /// Bellman target with the shared target network.
  double bellman_target(const Transition& t) const;

  const ParamSet& acting_params(NodeId) const override { return main_; }
  const ParamSet& target_params(NodeId) const override { return target_; }
  void load_params(const ParamSet& main, const ParamSet& target) override;

  const ReplayMemory& memory() const noexcept { return memory_; }
  std::size_t updates() const noexcept { return updates_; }

 private:
  CentralizedOptions options_;
  ParamSet main_;
  ParamSet target_;
  ReplayMemory memory_;
  std::mt19937_64 sample_rng_;
  std::size_t calls_ = 0;
  std::size_t updates_ = 0;
};

/// Local networks whose gradients are applied to a global network as soon as
/// each one is uploaded; the uploading router then adopts the global values.
class FederatedLearner final : public DeepAgent {
 public:
  FederatedLearner(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp, std::uint64_t seed);

  std::string name() const override { return "dgatr-federated"; }
  void learn(std::span<const DeliveryFeedback> feedback) override;
  /// Processes the transitions of router i in arrival order.
  void federated_step(NodeId i, const Transition& t);

  const ParamSet& acting_params(NodeId i) const override { return local_.at(static_cast<std::size_t>(i)); }
  const ParamSet& target_params(NodeId i) const override { return local_target_.at(static_cast<std::size_t>(i)); }
  void load_params(const ParamSet& main, const ParamSet& target) override;

  const ParamSet& global_params() const noexcept { return global_; }
  std::size_t updates() const noexcept { return updates_; }

 private:
  ParamSet global_;
  std::vector<ParamSet> local_;
  std::vector<ParamSet> local_target_;
  std::vector<ReplayMemory> memory_;
  std::mt19937_64 sample_rng_;
  std::size_t updates_ = 0;
};

/// Row-stochastic neighborhood averaging of parameter vectors:
/// out[i] = sum_j W[i][j] * in[j].
void consensus_average(const ConsensusMatrix& w, std::span<const ParamSet> in, std::span<ParamSet> out);

/// Each router takes a local gradient step to an auxiliary parameter vector,
/// shares it with its neighbors, and replaces its own parameters with the
/// neighborhood average of the latest auxiliary vectors every step.
class CooperatedLearner final : public DeepAgent {
 public:
  CooperatedLearner(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp, std::uint64_t seed);

  std::string name() const override { return "dgatr-cooperated"; }
  void learn(std::span<const DeliveryFeedback> feedback) override;
  /// Local update for router i on one stored transition.
  void local_step(NodeId i, const Transition& t);
  /// Consensus update for every router.
  void consensus_step();

  const ParamSet& acting_params(NodeId i) const override { return params_.at(static_cast<std::size_t>(i)); }
  const ParamSet& target_params(NodeId i) const override { return target_.at(static_cast<std::size_t>(i)); }
  void load_params(const ParamSet& main, const ParamSet& target) override;

  const ParamSet& auxiliary(NodeId i) const { return aux_.at(static_cast<std::size_t>(i)); }
  const ConsensusMatrix& weights() const noexcept { return weights_; }
  std::size_t updates() const noexcept { return updates_; }

 private:
  ConsensusMatrix weights_;
  std::vector<ParamSet> params_;
  std::vector<ParamSet> target_;
  std::vector<ParamSet> aux_;
  std::vector<ReplayMemory> memory_;
  std::vector<bool> aux_changed_;
  bool first_round_ = true;
  std::mt19937_64 sample_rng_;
  std::size_t updates_ = 0;
};

/// Builds the learner for a paradigm around the given model.
std::unique_ptr<DeepAgent> make_learner(Paradigm paradigm, const Topology& t, std::shared_ptr<const QModel> model,
                                        const Hyperparams& hp, std::uint64_t seed, CentralizedOptions central = {});

}  // namespace gatroute
