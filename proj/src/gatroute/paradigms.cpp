// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/paradigms.hpp"

#include "gatroute/error.hpp"

namespace gatroute {

std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::centralized: return "centralized";
    case Paradigm::federated: return "federated";
    case Paradigm::cooperated: return "cooperated";
  }
  return "?";
}

Paradigm parse_paradigm(std::string_view s) {
  if (s == "centralized") return Paradigm::centralized;
  if (s == "federated") return Paradigm::federated;
  if (s == "cooperated") return Paradigm::cooperated;
  throw ConfigError("unknown paradigm '" + std::string(s) + "' (expected centralized | federated | cooperated)");
}

namespace {

// Derives the replay-sampling stream from the agent seed so acting and
// sampling draw from independent generators.
std::uint64_t sampling_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ull; }

// Target computed by the receiving router: r + gamma * (feedback value).
double feedback_target(const Transition& t, double gamma) {
  return td_target(t.r, t.next_hop_target_value, t.f, gamma);
}

}  // namespace

// ---------------------------------------------------------------------------

CentralizedLearner::CentralizedLearner(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp,
                                       std::uint64_t seed, CentralizedOptions options)
    : DeepAgent(t, std::move(model), hp, seed),
      options_(options),
      memory_(options.memory_capacity, MemoryMode::ring),
      sample_rng_(sampling_seed(seed)) {
  if (options_.train_period <= 0) throw ConfigError("train_period must be positive");
  main_ = model_->init_params(seed);
  target_ = main_;
}

std::string CentralizedLearner::name() const { return std::string(model_->kind()) + "-centralized"; }

void CentralizedLearner::load_params(const ParamSet& main, const ParamSet& target) {
  if (!main.same_layout(main_) || !target.same_layout(main_)) throw ContractViolation("parameter shape mismatch");
  main_ = main;
  target_ = target;
}

double CentralizedLearner::bellman_target(const Transition& t) const {
  if (t.f) return t.r;
  auto q = model_->q_values(target_, encode(t.s_next, model_->nodes()));
  return td_target(t.r, max_over(q, t.s_next.neighbors), false, hp_.gamma);
}

void CentralizedLearner::centralized_step(std::span<const Transition> transitions) {
  for (const auto& t : transitions) {
    memory_.store_and_sample(t, static_cast<std::size_t>(hp_.batch_size), sample_rng_);
  }
  ++calls_;
  if (calls_ % static_cast<std::size_t>(options_.train_period) != 0) return;
  if (memory_.size() < static_cast<std::size_t>(hp_.batch_size)) return;
  auto sampled = memory_.sample(static_cast<std::size_t>(hp_.batch_size), sample_rng_);
  auto batch = make_batch(*model_, sampled, [this](const Transition& t) { return bellman_target(t); });
  Gradient grad = model_->backward(main_, batch);
  sgd_step(main_, grad, hp_.step_size);
  soft_update(target_, main_, hp_.tau);
  ++updates_;
}

void CentralizedLearner::learn(std::span<const DeliveryFeedback> feedback) {
  if (!learning_) return;
  std::vector<Transition> transitions;
  transitions.reserve(feedback.size());
  for (const auto& fb : feedback) transitions.push_back(to_transition(fb));
  centralized_step(transitions);
}

// ---------------------------------------------------------------------------

FederatedLearner::FederatedLearner(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp,
                                   std::uint64_t seed)
    : DeepAgent(t, std::move(model), hp, seed), sample_rng_(sampling_seed(seed)) {
  global_ = model_->init_params(seed);
  const auto n = static_cast<std::size_t>(t.node_count());
  local_.assign(n, global_);
  local_target_.assign(n, global_);
  memory_.assign(n, ReplayMemory(static_cast<std::size_t>(hp_.memory_capacity), MemoryMode::fill_and_clear));
}

void FederatedLearner::load_params(const ParamSet& main, const ParamSet& target) {
  if (!main.same_layout(global_) || !target.same_layout(global_)) throw ContractViolation("parameter shape mismatch");
  global_ = main;
  for (auto& p : local_) p = main;
  for (auto& p : local_target_) p = target;
}

void FederatedLearner::federated_step(NodeId i, const Transition& t) {
  const auto idx = static_cast<std::size_t>(i);
  auto sampled = memory_.at(idx).store_and_sample(t, static_cast<std::size_t>(hp_.batch_size), sample_rng_);
  if (!sampled) return;
  const double gamma = hp_.gamma;
  auto batch = make_batch(*model_, *sampled, [gamma](const Transition& tr) { return feedback_target(tr, gamma); });
  // Gradient at the router's own (possibly stale) parameters, applied to the
  // global network immediately.
  Gradient grad = model_->backward(local_[idx], batch);
  sgd_step(global_, grad, hp_.step_size);
  local_[idx] = global_;
  soft_update(local_target_[idx], local_[idx], hp_.tau);
  ++updates_;
}

void FederatedLearner::learn(std::span<const DeliveryFeedback> feedback) {
  if (!learning_) return;
  for (const auto& fb : feedback) federated_step(fb.sender, to_transition(fb));
}

// ---------------------------------------------------------------------------

void consensus_average(const ConsensusMatrix& w, std::span<const ParamSet> in, std::span<ParamSet> out) {
  if (in.size() != static_cast<std::size_t>(w.size()) || out.size() != in.size()) {
    throw ContractViolation("consensus needs one parameter set per node");
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto dst = out[i].values();
    std::fill(dst.begin(), dst.end(), 0.0);
    auto row = w.row(static_cast<int>(i));
    for (std::size_t j = 0; j < in.size(); ++j) {
      if (row[j] == 0.0) continue;
      auto src = in[j].values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += row[j] * src[k];
    }
  }
}

CooperatedLearner::CooperatedLearner(const Topology& t, std::shared_ptr<const QModel> model, Hyperparams hp,
                                     std::uint64_t seed)
    : DeepAgent(t, std::move(model), hp, seed), weights_(consensus_matrix(t)), sample_rng_(sampling_seed(seed)) {
  const auto n = static_cast<std::size_t>(t.node_count());
  ParamSet init = model_->init_params(seed);
  params_.assign(n, init);
  target_.assign(n, init);
  aux_.assign(n, init);
  aux_changed_.assign(n, false);
  memory_.assign(n, ReplayMemory(static_cast<std::size_t>(hp_.memory_capacity), MemoryMode::fill_and_clear));
}

void CooperatedLearner::load_params(const ParamSet& main, const ParamSet& target) {
  if (!main.same_layout(params_.front()) || !target.same_layout(params_.front())) {
    throw ContractViolation("parameter shape mismatch");
  }
  for (auto& p : params_) p = main;
  for (auto& p : aux_) p = main;
  for (auto& p : target_) p = target;
  first_round_ = true;
}

void CooperatedLearner::local_step(NodeId i, const Transition& t) {
  const auto idx = static_cast<std::size_t>(i);
  auto sampled = memory_.at(idx).store_and_sample(t, static_cast<std::size_t>(hp_.batch_size), sample_rng_);
  if (!sampled) return;
  const double gamma = hp_.gamma;
  auto batch = make_batch(*model_, *sampled, [gamma](const Transition& tr) { return feedback_target(tr, gamma); });
  Gradient grad = model_->backward(params_[idx], batch);
  aux_[idx] = params_[idx];
  sgd_step(aux_[idx], grad, hp_.step_size);
  soft_update(target_[idx], aux_[idx], hp_.tau);
  aux_changed_[idx] = true;
  ++updates_;
}

void CooperatedLearner::consensus_step() {
  const int n = weights_.size();
  // A router whose neighborhood shared nothing new would recompute the same
  // average as last step, so only dirty rows are evaluated.
  for (NodeId i = 0; i < n; ++i) {
    bool dirty = first_round_;
    auto row = weights_.row(i);
    for (NodeId j = 0; j < n && !dirty; ++j) dirty = row[j] != 0.0 && aux_changed_[j];
    if (!dirty) continue;
    auto dst = params_[i].values();
    std::fill(dst.begin(), dst.end(), 0.0);
    for (NodeId j = 0; j < n; ++j) {
      if (row[j] == 0.0) continue;
      auto src = aux_[j].values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += row[j] * src[k];
    }
  }
  std::fill(aux_changed_.begin(), aux_changed_.end(), false);
  first_round_ = false;
}

void CooperatedLearner::learn(std::span<const DeliveryFeedback> feedback) {
  if (!learning_) return;
  for (const auto& fb : feedback) local_step(fb.sender, to_transition(fb));
  consensus_step();
}

// ---------------------------------------------------------------------------

std::unique_ptr<DeepAgent> make_learner(Paradigm paradigm, const Topology& t, std::shared_ptr<const QModel> model,
                                        const Hyperparams& hp, std::uint64_t seed, CentralizedOptions central) {
  switch (paradigm) {
    case Paradigm::centralized:
      return std::make_unique<CentralizedLearner>(t, std::move(model), hp, seed, central);
    case Paradigm::federated:
      return std::make_unique<FederatedLearner>(t, std::move(model), hp, seed);
    case Paradigm::cooperated:
      return std::make_unique<CooperatedLearner>(t, std::move(model), hp, seed);
  }
  throw ConfigError("unknown paradigm");
}

}  // namespace gatroute
