// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatroute/agents.hpp"
#include "gatroute/paradigms.hpp"
#include "gatroute/params.hpp"
#include "gatroute/qnet.hpp"
#include "gatroute/simcore.hpp"
#include "gatroute/topology.hpp"

namespace gatroute {

enum class Algorithm { shortest, qrouting, dqn, dgatr, global };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);
/// Name written to reports; the queue-aware reference carries a heuristic tag.
std::string report_name(Algorithm a);

struct LoadLevel {
  double lambda = 1.0;
  long settle_steps = 20000;
  long measure_steps = 2000;
};

struct PretrainOptions {
  long steps = 0;                      // gradient updates; 0 disables pre-training in sweeps
  double load = 1.0;                   // teacher and evaluation load
  long teacher_max_steps = 100000;
  long teacher_stable_steps = 10000;   // greedy policy unchanged this long => converged
  long samples = 20000;                // logged teacher transitions
  double log_exploration = 0.2;        // chance a logged hop is a uniformly random neighbor
  int batch_size = 0;                  // 0: use hyperparams.batch_size
  double step_size = 0.0;              // 0: use hyperparams.step_size
  long eval_settle_steps = 500;
  long eval_measure_steps = 2000;
};

struct ExperimentConfig {
  std::string topology = "grid:6x6";  // file path or grid:RxC[:u-v,u-v,...]
  std::string base_dir;               // resolves relative topology paths
  Algorithm algorithm = Algorithm::dgatr;
  Paradigm paradigm = Paradigm::centralized;
  Hyperparams hyperparams;
  std::vector<LoadLevel> loads;
  int repetitions = 10;
  std::uint64_t seed = 1;
  PretrainOptions pretrain;
  CentralizedOptions centralized;
  double qrouting_eta = 0.7;
  int dqn_hidden_units = 128;
  double service_time = 1.0;

  void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text, std::string base_dir = {});
ExperimentConfig load_config_file(const std::string& path);
/// Canonical JSON of every setting except the seed (topology inlined as text).
std::string canonical_config(const ExperimentConfig& cfg);
/// 16 hex digits identifying canonical_config().
std::string config_hash(const ExperimentConfig& cfg);

Topology resolve_topology(const ExperimentConfig& cfg);
/// Paradigm label for reports; only the neural learners have one.
std::string paradigm_label(const ExperimentConfig& cfg);

using ProgressFn = std::function<void(std::string_view)>;

std::shared_ptr<const QModel> make_model(const ExperimentConfig& cfg, const Topology& t);
std::unique_ptr<RoutingAgent> make_agent(const ExperimentConfig& cfg, const Topology& t, std::uint64_t seed);

/// Steps the simulator and feeds every step's feedback to the agent.
void run_steps(Simulator& sim, RoutingAgent& agent, long steps);

struct WindowResult {
  double lambda = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::optional<double> avg_delay;  // delivered packets born inside the window
  std::uint64_t delivered = 0;
  std::size_t in_flight = 0;        // at window end
  std::size_t born = 0;             // packets injected inside the window
  /// Average over every packet born in the window, counting undelivered
  /// ones with their age at the window end.
  std::optional<double> delay_with_in_flight;
  std::vector<std::size_t> in_flight_trace;  // per step inside the window
};

/// Runs settle steps then a measurement window at the simulator's load.
WindowResult measure_window(Simulator& sim, RoutingAgent& agent, long settle_steps, long measure_steps);

/// True when the in-flight count shows no sustained growth over the window:
/// the least-squares growth across the window stays below N packets plus 2%
/// of the traffic injected during it.
bool in_flight_bounded(const std::vector<std::size_t>& trace, int nodes, double lambda);

// ---------------------------------------------------------------------------
// Pre-training

struct TeacherResult {
  std::unique_ptr<QRoutingAgent> agent;
  bool converged = false;
  long steps = 0;
};

/// Q-routing trained at `load` until its greedy policy is unchanged for
/// stable_steps consecutive steps or max_steps elapse.
TeacherResult train_teacher(const Topology& t, const PretrainOptions& opt, double eta, double service_time,
                            std::uint64_t seed);

/// Transitions (s, a, r, s', a', f) logged from a frozen teacher at `load`.
/// Each hop deviates to a random neighbor with probability log_exploration so
/// non-greedy actions are covered; a' is always the teacher's greedy choice.
std::vector<Transition> log_teacher_transitions(const Topology& t, QRoutingAgent& teacher, const PretrainOptions& opt,
                                                double service_time, std::uint64_t seed);

/// Off-policy regression towards r + gamma * Q(s', a'; target) * (1 - f).
class OfflineTrainer {
 public:
  OfflineTrainer(std::shared_ptr<const QModel> model, Hyperparams hp, int batch_size, std::uint64_t seed);

  void train(std::span<const Transition> data, long updates);
  const ParamSet& main() const noexcept { return main_; }
  const ParamSet& target() const noexcept { return target_; }
  long updates() const noexcept { return updates_; }

 private:
  std::shared_ptr<const QModel> model_;
  Hyperparams hp_;
  int batch_size_;
  std::mt19937_64 rng_;
  ParamSet main_;
  ParamSet target_;
  long updates_ = 0;
};

/// Frozen-policy evaluation at the pre-training load.
WindowResult evaluate_policy(const Topology& t, RoutingAgent& agent, const PretrainOptions& opt, double service_time,
                             std::uint64_t seed);

struct PretrainPoint {
  long steps = 0;
  WindowResult eval;
};

struct PretrainReport {
  Algorithm algorithm = Algorithm::dgatr;
  std::uint64_t seed = 0;
  bool teacher_converged = false;
  long teacher_steps = 0;
  WindowResult teacher_eval;
  std::vector<PretrainPoint> points;  // ascending step budgets
  ParamSet main;                      // parameters after the largest budget
  ParamSet target;
};

struct TeacherData {
  std::vector<Transition> transitions;
  WindowResult eval;  // teacher measured like the pre-trained networks
  bool converged = false;
  long steps = 0;
};

/// Trains the Q-routing teacher for `seed`, logs its transitions and
/// evaluates it with the same traffic later used for the networks.
TeacherData prepare_teacher(const ExperimentConfig& cfg, const Topology& t, std::uint64_t seed);

/// Trains a teacher, logs its transitions and pre-trains the configured
/// network, evaluating after each budget in `budgets` (ascending).
PretrainReport pretrain(const ExperimentConfig& cfg, std::vector<long> budgets, std::uint64_t seed,
                        const ProgressFn& progress = {});

/// Same as pretrain() but reuses an existing teacher dataset.
PretrainReport pretrain_on(const ExperimentConfig& cfg, const Topology& t, std::span<const Transition> data,
                           std::vector<long> budgets, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sweeps and comparisons

struct SweepRow {
  WindowResult window;
  std::string algorithm;
  std::string paradigm;
  std::uint64_t seed = 0;
  std::string config_hash;
  long pretrain_steps = 0;
  int level_index = 0;
};

struct LevelSummary {
  int level_index = 0;
  double lambda = 0.0;
  std::optional<double> mean_delay;
  double var_delay = 0.0;  // sample variance across repetitions
  double mean_in_flight = 0.0;
  int repetitions = 0;
  int bounded_runs = 0;    // repetitions whose in-flight count stayed bounded
};

struct SweepResult {
  std::string algorithm;
  std::string paradigm;
  std::string config_hash;
  std::vector<SweepRow> rows;
  std::vector<LevelSummary> summary;
};

SweepResult load_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {});
std::vector<SweepResult> compare(const std::vector<ExperimentConfig>& cfgs, const ProgressFn& progress = {});

std::string csv_header();
std::string to_csv(const std::vector<SweepRow>& rows, bool with_header = true);
std::string pretrain_csv(const ExperimentConfig& cfg, const std::vector<PretrainReport>& reports);
std::string summary_csv(const std::vector<SweepResult>& results);
/// Text table: one row per (algorithm, paradigm), one column per load level,
/// cells "mean +- variance".
std::string summary_table(const std::vector<SweepResult>& results);

}  // namespace gatroute
