// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gatroute/error.hpp"

namespace gatroute {

using json = nlohmann::json;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::shortest: return "shortest";
    case Algorithm::qrouting: return "qrouting";
    case Algorithm::dqn: return "dqn";
    case Algorithm::dgatr: return "dgatr";
    case Algorithm::global: return "global";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "shortest") return Algorithm::shortest;
  if (s == "qrouting") return Algorithm::qrouting;
  if (s == "dqn") return Algorithm::dqn;
  if (s == "dgatr") return Algorithm::dgatr;
  if (s == "global") return Algorithm::global;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected shortest | qrouting | dqn | dgatr | global)");
}

std::string report_name(Algorithm a) {
  return a == Algorithm::global ? "global-heuristic" : std::string(to_string(a));
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent stream for one purpose within a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) { return splitmix(splitmix(seed) + purpose); }

enum SeedPurpose : std::uint64_t { kSimSeed = 1, kAgentSeed, kTeacherSeed, kLogSeed, kEvalSeed, kTrainerSeed };

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

bool is_neural(Algorithm a) { return a == Algorithm::dgatr || a == Algorithm::dqn; }

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  hyperparams.validate();
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  for (const auto& l : loads) {
    if (!(l.lambda >= 0.0)) throw ConfigError("loads must be non-negative");
    if (l.settle_steps < 0 || l.measure_steps <= 0) throw ConfigError("measure_steps must be positive, settle_steps non-negative");
  }
  if (pretrain.steps < 0) throw ConfigError("pretrain steps must be non-negative");
  if (pretrain.samples <= 0 || pretrain.eval_measure_steps <= 0) throw ConfigError("pretrain samples and eval window must be positive");
  if (!(pretrain.step_size >= 0.0)) throw ConfigError("pretrain step_size must be non-negative");
  if (!(pretrain.log_exploration >= 0.0 && pretrain.log_exploration <= 1.0)) throw ConfigError("log_exploration must lie in [0, 1]");
  if (!(service_time > 0.0)) throw ConfigError("service_time must be positive");
  if (dqn_hidden_units <= 0) throw ConfigError("dqn hidden_units must be positive");
  if (centralized.train_period <= 0 || centralized.memory_capacity == 0) throw ConfigError("invalid centralized options");
}

ExperimentConfig parse_config(std::string_view json_text, std::string base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.base_dir = std::move(base_dir);
  try {
    reject_unknown(j, {"topology", "algorithm", "paradigm", "hyperparams", "loads", "repetitions", "seed", "pretrain",
                       "centralized", "qrouting", "dqn", "service_time"},
                   "config");
    read_if(j, "topology", cfg.topology);
    if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
    if (j.contains("paradigm")) cfg.paradigm = parse_paradigm(j["paradigm"].get<std::string>());
    if (j.contains("hyperparams")) {
      const auto& h = j["hyperparams"];
      reject_unknown(h, {"gamma", "step_size", "tau", "gat_features", "hidden_units", "leaky_slope", "batch_size",
                         "memory_capacity", "epsilon"},
                     "hyperparams");
      auto& hp = cfg.hyperparams;
      read_if(h, "gamma", hp.gamma);
      read_if(h, "step_size", hp.step_size);
      read_if(h, "tau", hp.tau);
      read_if(h, "gat_features", hp.gat_features);
      read_if(h, "hidden_units", hp.hidden_units);
      read_if(h, "leaky_slope", hp.leaky_slope);
      read_if(h, "batch_size", hp.batch_size);
      read_if(h, "memory_capacity", hp.memory_capacity);
      read_if(h, "epsilon", hp.epsilon);
    }
    if (j.contains("loads")) {
      for (const auto& l : j["loads"]) {
        reject_unknown(l, {"lambda", "settle_steps", "measure_steps"}, "loads entry");
        LoadLevel level;
        level.lambda = l.at("lambda").get<double>();
        read_if(l, "settle_steps", level.settle_steps);
        read_if(l, "measure_steps", level.measure_steps);
        cfg.loads.push_back(level);
      }
    }
    read_if(j, "repetitions", cfg.repetitions);
    read_if(j, "seed", cfg.seed);
    read_if(j, "service_time", cfg.service_time);
    if (j.contains("pretrain")) {
      const auto& p = j["pretrain"];
      reject_unknown(p, {"steps", "load", "teacher_max_steps", "teacher_stable_steps", "samples", "log_exploration", "batch_size", "step_size",
                         "eval_settle_steps", "eval_measure_steps"},
                     "pretrain");
      read_if(p, "steps", cfg.pretrain.steps);
      read_if(p, "load", cfg.pretrain.load);
      read_if(p, "teacher_max_steps", cfg.pretrain.teacher_max_steps);
      read_if(p, "teacher_stable_steps", cfg.pretrain.teacher_stable_steps);
      read_if(p, "samples", cfg.pretrain.samples);
      read_if(p, "log_exploration", cfg.pretrain.log_exploration);
      read_if(p, "batch_size", cfg.pretrain.batch_size);
      read_if(p, "step_size", cfg.pretrain.step_size);
      read_if(p, "eval_settle_steps", cfg.pretrain.eval_settle_steps);
      read_if(p, "eval_measure_steps", cfg.pretrain.eval_measure_steps);
    }
    if (j.contains("centralized")) {
      const auto& c = j["centralized"];
      reject_unknown(c, {"memory_capacity", "train_period"}, "centralized");
      read_if(c, "memory_capacity", cfg.centralized.memory_capacity);
      read_if(c, "train_period", cfg.centralized.train_period);
    }
    if (j.contains("qrouting")) {
      reject_unknown(j["qrouting"], {"eta"}, "qrouting");
      read_if(j["qrouting"], "eta", cfg.qrouting_eta);
    }
    if (j.contains("dqn")) {
      reject_unknown(j["dqn"], {"hidden_units"}, "dqn");
      read_if(j["dqn"], "hidden_units", cfg.dqn_hidden_units);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(buf.str(), dir);
}

Topology resolve_topology(const ExperimentConfig& cfg) {
  const std::string& src = cfg.topology;
  if (src.rfind("grid:", 0) == 0) {
    std::string_view rest(src);
    rest.remove_prefix(5);
    auto colon = rest.find(':');
    auto dims = rest.substr(0, colon);
    auto x = dims.find('x');
    int rows = 0, cols = 0;
    if (x == std::string_view::npos ||
        std::from_chars(dims.data(), dims.data() + x, rows).ec != std::errc() ||
        std::from_chars(dims.data() + x + 1, dims.data() + dims.size(), cols).ec != std::errc()) {
      throw ConfigError("grid topology must look like grid:RxC[:u-v,...], got " + src);
    }
    std::vector<std::pair<NodeId, NodeId>> removed;
    if (colon != std::string_view::npos) {
      std::string list(rest.substr(colon + 1));
      std::stringstream items(list);
      std::string item;
      while (std::getline(items, item, ',')) {
        auto dash = item.find('-');
        if (dash == std::string::npos) throw ConfigError("bad removed link '" + item + "'");
        removed.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
      }
    }
    try {
      return grid_topology(rows, cols, removed);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
  }
  std::filesystem::path path(src);
  if (path.is_relative() && !cfg.base_dir.empty()) path = std::filesystem::path(cfg.base_dir) / path;
  return load_topology_file(path.string());
}

std::string paradigm_label(const ExperimentConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::dgatr: return std::string(to_string(cfg.paradigm));
    case Algorithm::dqn: return "centralized";
    default: return "none";
  }
}

std::string canonical_config(const ExperimentConfig& cfg) {
  const auto& hp = cfg.hyperparams;
  json j;
  j["topology"] = to_text(resolve_topology(cfg));
  j["algorithm"] = std::string(to_string(cfg.algorithm));
  j["paradigm"] = std::string(to_string(cfg.paradigm));
  j["hyperparams"] = {{"gamma", hp.gamma},
                      {"step_size", hp.step_size},
                      {"tau", hp.tau},
                      {"gat_features", hp.gat_features},
                      {"hidden_units", hp.hidden_units},
                      {"leaky_slope", hp.leaky_slope},
                      {"batch_size", hp.batch_size},
                      {"memory_capacity", hp.memory_capacity},
                      {"epsilon", hp.epsilon}};
  json loads = json::array();
  for (const auto& l : cfg.loads) {
    loads.push_back({{"lambda", l.lambda}, {"settle_steps", l.settle_steps}, {"measure_steps", l.measure_steps}});
  }
  j["loads"] = loads;
  j["repetitions"] = cfg.repetitions;
  const auto& p = cfg.pretrain;
  j["pretrain"] = {{"steps", p.steps},
                   {"load", p.load},
                   {"teacher_max_steps", p.teacher_max_steps},
                   {"teacher_stable_steps", p.teacher_stable_steps},
                   {"samples", p.samples},
                   {"log_exploration", p.log_exploration},
                   {"batch_size", p.batch_size},
                   {"step_size", p.step_size},
                   {"eval_settle_steps", p.eval_settle_steps},
                   {"eval_measure_steps", p.eval_measure_steps}};
  j["centralized"] = {{"memory_capacity", cfg.centralized.memory_capacity},
                      {"train_period", cfg.centralized.train_period}};
  j["qrouting"] = {{"eta", cfg.qrouting_eta}};
  j["dqn"] = {{"hidden_units", cfg.dqn_hidden_units}};
  j["service_time"] = cfg.service_time;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  // 64-bit FNV-1a over the canonical form.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

// ---------------------------------------------------------------------------
// Agents and runs

std::shared_ptr<const QModel> make_model(const ExperimentConfig& cfg, const Topology& t) {
  const auto& hp = cfg.hyperparams;
  if (cfg.algorithm == Algorithm::dqn) {
    return std::make_shared<FcQNet>(t.node_count(), cfg.dqn_hidden_units, cfg.dqn_hidden_units);
  }
  if (cfg.algorithm == Algorithm::dgatr) {
    return std::make_shared<GatQNet>(t, hp.gat_features, hp.hidden_units, hp.leaky_slope);
  }
  throw ConfigError("algorithm " + std::string(to_string(cfg.algorithm)) + " has no neural network");
}

std::unique_ptr<RoutingAgent> make_agent(const ExperimentConfig& cfg, const Topology& t, std::uint64_t seed) {
  switch (cfg.algorithm) {
    case Algorithm::shortest: return std::make_unique<ShortestPathAgent>(t);
    case Algorithm::global: return std::make_unique<GlobalRoutingAgent>();
    case Algorithm::qrouting: return std::make_unique<QRoutingAgent>(t, cfg.qrouting_eta, cfg.hyperparams.gamma);
    case Algorithm::dqn:
      return std::make_unique<CentralizedLearner>(t, make_model(cfg, t), cfg.hyperparams, seed, cfg.centralized);
    case Algorithm::dgatr:
      return make_learner(cfg.paradigm, t, make_model(cfg, t), cfg.hyperparams, seed, cfg.centralized);
  }
  throw ConfigError("unknown algorithm");
}

void run_steps(Simulator& sim, RoutingAgent& agent, long steps) {
  for (long k = 0; k < steps; ++k) {
    auto feedback = sim.step(agent);
    agent.learn(feedback);
  }
}

WindowResult measure_window(Simulator& sim, RoutingAgent& agent, long settle_steps, long measure_steps) {
  run_steps(sim, agent, settle_steps);
  WindowResult r;
  r.lambda = sim.load();
  r.window_start = sim.now();
  const auto injected_before = sim.injected_count();
  sim.metrics().open_window(sim.now());
  r.in_flight_trace.reserve(static_cast<std::size_t>(measure_steps));
  for (long k = 0; k < measure_steps; ++k) {
    auto feedback = sim.step(agent);
    agent.learn(feedback);
    r.in_flight_trace.push_back(sim.in_flight());
  }
  r.window_end = sim.now();
  const auto& m = sim.metrics();
  r.avg_delay = m.window_average_delay();
  r.delivered = m.window_delivered();
  r.in_flight = sim.in_flight();
  r.born = static_cast<std::size_t>(sim.injected_count() - injected_before);
  auto ages = sim.in_flight_ages(r.window_start);
  const double total = static_cast<double>(m.window_delivered() + ages.count);
  if (total > 0) r.delay_with_in_flight = (m.window_delay_sum() + ages.age_sum) / total;
  return r;
}

bool in_flight_bounded(const std::vector<std::size_t>& trace, int nodes, double lambda) {
  const std::size_t n = trace.size();
  if (n < 2) return true;
  double mean_t = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mean_t += static_cast<double>(k);
    mean_y += static_cast<double>(trace[k]);
  }
  mean_t /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double cov = 0.0, var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = static_cast<double>(k) - mean_t;
    cov += dt * (static_cast<double>(trace[k]) - mean_y);
    var += dt * dt;
  }
  const double growth = cov / var * static_cast<double>(n);
  return growth <= static_cast<double>(nodes) + 0.02 * lambda * static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Pre-training

namespace {

class ExploringPolicy final : public RoutingPolicy {
 public:
  ExploringPolicy(RoutingPolicy& base, double epsilon, std::uint64_t seed) : base_(base), epsilon_(epsilon), rng_(seed) {}

  NodeId route(const Simulator& sim, const Packet& packet) override {
    if (epsilon_ > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < epsilon_) {
      auto nb = sim.topology().neighbors(packet.current_node);
      return nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng_)];
    }
    return base_.route(sim, packet);
  }

 private:
  RoutingPolicy& base_;
  double epsilon_;
  std::mt19937_64 rng_;
};

}  // namespace

TeacherResult train_teacher(const Topology& t, const PretrainOptions& opt, double eta, double service_time,
                            std::uint64_t seed) {
  TeacherResult out;
  out.agent = std::make_unique<QRoutingAgent>(t, eta);
  Simulator sim(t, {opt.load, seed, service_time});
  const int n = t.node_count();
  std::vector<NodeId> greedy(static_cast<std::size_t>(n) * n, -1);
  auto snapshot = [&](NodeId x, NodeId d) -> NodeId& { return greedy[static_cast<std::size_t>(x) * n + d]; };
  for (NodeId x = 0; x < n; ++x) {
    if (t.neighbors(x).empty()) continue;
    for (NodeId d = 0; d < n; ++d) snapshot(x, d) = out.agent->table().greedy(x, d);
  }
  long stable = 0;
  while (out.steps < opt.teacher_max_steps) {
    auto feedback = sim.step(*out.agent);
    out.agent->learn(feedback);
    ++out.steps;
    bool changed = false;
    for (const auto& fb : feedback) {
      NodeId& g = snapshot(fb.sender, fb.state.destination);
      const NodeId now = out.agent->table().greedy(fb.sender, fb.state.destination);
      if (now != g) {
        g = now;
        changed = true;
      }
    }
    stable = changed ? 0 : stable + 1;
    if (stable >= opt.teacher_stable_steps) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::vector<Transition> log_teacher_transitions(const Topology& t, QRoutingAgent& teacher, const PretrainOptions& opt,
                                                double service_time, std::uint64_t seed) {
  Simulator sim(t, {opt.load, seed, service_time});
  const bool was_learning = teacher.learning();
  teacher.set_learning(false);
  ExploringPolicy behavior(teacher, opt.log_exploration, derive_seed(seed, kLogSeed));
  std::vector<Transition> data;
  data.reserve(static_cast<std::size_t>(opt.samples));
  while (static_cast<long>(data.size()) < opt.samples) {
    for (const auto& fb : sim.step(behavior)) {
      Transition tr = to_transition(fb);
      if (!tr.f) tr.a_next = teacher.table().greedy(tr.s_next.current, tr.s_next.destination);
      data.push_back(std::move(tr));
      if (static_cast<long>(data.size()) >= opt.samples) break;
    }
  }
  teacher.set_learning(was_learning);
  return data;
}

OfflineTrainer::OfflineTrainer(std::shared_ptr<const QModel> model, Hyperparams hp, int batch_size, std::uint64_t seed)
    : model_(std::move(model)), hp_(hp), batch_size_(batch_size > 0 ? batch_size : hp.batch_size), rng_(seed) {
  main_ = model_->init_params(seed);
  target_ = main_;
}

void OfflineTrainer::train(std::span<const Transition> data, long updates) {
  if (updates <= 0) return;
  if (data.empty()) throw ContractViolation("pre-training needs logged transitions");
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  std::vector<Transition> sampled(static_cast<std::size_t>(batch_size_));
  for (long u = 0; u < updates; ++u) {
    for (auto& s : sampled) s = data[pick(rng_)];
    auto batch = make_batch(*model_, sampled, [this](const Transition& tr) {
      if (tr.f) return tr.r;
      if (!tr.a_next) throw ContractViolation("pre-training transition lacks the logged next action");
      auto q = model_->q_values(target_, encode(tr.s_next, model_->nodes()));
      return td_target(tr.r, q[static_cast<std::size_t>(*tr.a_next)], false, hp_.gamma);
    });
    Gradient grad = model_->backward(main_, batch);
    sgd_step(main_, grad, hp_.step_size);
    soft_update(target_, main_, hp_.tau);
    ++updates_;
  }
}

WindowResult evaluate_policy(const Topology& t, RoutingAgent& agent, const PretrainOptions& opt, double service_time,
                             std::uint64_t seed) {
  const bool was_learning = agent.learning();
  agent.set_learning(false);
  Simulator sim(t, {opt.load, seed, service_time});
  auto result = measure_window(sim, agent, opt.eval_settle_steps, opt.eval_measure_steps);
  agent.set_learning(was_learning);
  return result;
}

PretrainReport pretrain_on(const ExperimentConfig& cfg, const Topology& t, std::span<const Transition> data,
                           std::vector<long> budgets, std::uint64_t seed) {
  if (!is_neural(cfg.algorithm)) throw ConfigError("pre-training applies to dgatr and dqn only");
  std::sort(budgets.begin(), budgets.end());
  PretrainReport report;
  report.algorithm = cfg.algorithm;
  report.seed = seed;
  auto model = make_model(cfg, t);
  Hyperparams offline = cfg.hyperparams;
  if (cfg.pretrain.step_size > 0.0) offline.step_size = cfg.pretrain.step_size;
  OfflineTrainer trainer(model, offline, cfg.pretrain.batch_size, derive_seed(seed, kTrainerSeed));
  CentralizedLearner evaluator(t, model, cfg.hyperparams, derive_seed(seed, kAgentSeed), cfg.centralized);
  for (long budget : budgets) {
    if (budget < 0) throw ConfigError("pre-train budgets must be non-negative");
    trainer.train(data, budget - trainer.updates());
    evaluator.load_params(trainer.main(), trainer.target());
    PretrainPoint point;
    point.steps = budget;
    point.eval = evaluate_policy(t, evaluator, cfg.pretrain, cfg.service_time, derive_seed(seed, kEvalSeed));
    report.points.push_back(std::move(point));
  }
  report.main = trainer.main();
  report.target = trainer.target();
  return report;
}

TeacherData prepare_teacher(const ExperimentConfig& cfg, const Topology& t, std::uint64_t seed) {
  auto teacher = train_teacher(t, cfg.pretrain, cfg.qrouting_eta, cfg.service_time, derive_seed(seed, kTeacherSeed));
  TeacherData out;
  out.converged = teacher.converged;
  out.steps = teacher.steps;
  out.transitions =
      log_teacher_transitions(t, *teacher.agent, cfg.pretrain, cfg.service_time, derive_seed(seed, kLogSeed));
  out.eval = evaluate_policy(t, *teacher.agent, cfg.pretrain, cfg.service_time, derive_seed(seed, kEvalSeed));
  return out;
}

PretrainReport pretrain(const ExperimentConfig& cfg, std::vector<long> budgets, std::uint64_t seed,
                        const ProgressFn& progress) {
  const Topology t = resolve_topology(cfg);
  auto teacher = prepare_teacher(cfg, t, seed);
  if (!teacher.converged && progress) {
    progress("warning: Q-routing teacher did not converge within " + std::to_string(teacher.steps) +
             " steps; continuing");
  }
  auto report = pretrain_on(cfg, t, teacher.transitions, std::move(budgets), seed);
  report.teacher_converged = teacher.converged;
  report.teacher_steps = teacher.steps;
  report.teacher_eval = std::move(teacher.eval);
  if (progress) {
    for (const auto& p : report.points) {
      progress("pretrain " + std::string(to_string(cfg.algorithm)) + " seed " + std::to_string(seed) + " steps " +
               std::to_string(p.steps) + ": delay " + format_optional(p.eval.delay_with_in_flight) +
               " (teacher " + format_optional(report.teacher_eval.delay_with_in_flight) + ")");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

std::vector<LevelSummary> summarize(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows, int nodes) {
  std::vector<LevelSummary> out;
  for (std::size_t level = 0; level < cfg.loads.size(); ++level) {
    LevelSummary s;
    s.level_index = static_cast<int>(level);
    s.lambda = cfg.loads[level].lambda;
    std::vector<double> delays;
    double in_flight = 0.0;
    for (const auto& r : rows) {
      if (r.level_index != s.level_index) continue;
      ++s.repetitions;
      in_flight += static_cast<double>(r.window.in_flight);
      if (r.window.avg_delay) delays.push_back(*r.window.avg_delay);
      if (in_flight_bounded(r.window.in_flight_trace, nodes, s.lambda)) ++s.bounded_runs;
    }
    if (s.repetitions > 0) s.mean_in_flight = in_flight / s.repetitions;
    if (!delays.empty()) {
      double mean = 0.0;
      for (double d : delays) mean += d;
      mean /= static_cast<double>(delays.size());
      s.mean_delay = mean;
      if (delays.size() > 1) {
        double ss = 0.0;
        for (double d : delays) ss += (d - mean) * (d - mean);
        s.var_delay = ss / static_cast<double>(delays.size() - 1);
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

SweepResult load_sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  if (cfg.loads.empty()) throw ConfigError("load schedule is empty");
  const Topology t = resolve_topology(cfg);
  SweepResult result;
  result.algorithm = report_name(cfg.algorithm);
  result.paradigm = paradigm_label(cfg);
  result.config_hash = config_hash(cfg);
  const bool pretrained = is_neural(cfg.algorithm) && cfg.pretrain.steps > 0;

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
    auto agent = make_agent(cfg, t, derive_seed(seed, kAgentSeed));
    if (pretrained) {
      auto report = pretrain(cfg, {cfg.pretrain.steps}, seed, progress);
      dynamic_cast<DeepAgent&>(*agent).load_params(report.main, report.target);
    }
    Simulator sim(t, {cfg.loads.front().lambda, derive_seed(seed, kSimSeed), cfg.service_time});
    for (std::size_t level = 0; level < cfg.loads.size(); ++level) {
      const auto& l = cfg.loads[level];
      sim.set_load(l.lambda);
      SweepRow row;
      row.window = measure_window(sim, *agent, l.settle_steps, l.measure_steps);
      row.algorithm = result.algorithm;
      row.paradigm = result.paradigm;
      row.seed = seed;
      row.config_hash = result.config_hash;
      row.pretrain_steps = pretrained ? cfg.pretrain.steps : 0;
      row.level_index = static_cast<int>(level);
      if (progress) {
        progress(result.algorithm + "/" + result.paradigm + " seed " + std::to_string(seed) + " load " +
                 format_double(l.lambda) + ": delay " + format_optional(row.window.avg_delay) + ", in flight " +
                 std::to_string(row.window.in_flight));
      }
      result.rows.push_back(std::move(row));
    }
  }
  result.summary = summarize(cfg, result.rows, t.node_count());
  return result;
}

std::vector<SweepResult> compare(const std::vector<ExperimentConfig>& cfgs, const ProgressFn& progress) {
  if (cfgs.empty()) throw ConfigError("compare needs at least one config");
  const std::string topo = to_text(resolve_topology(cfgs.front()));
  for (const auto& c : cfgs) {
    if (to_text(resolve_topology(c)) != topo) throw ConfigError("compared configs use different topologies");
    if (c.loads.size() != cfgs.front().loads.size()) throw ConfigError("compared configs use different load schedules");
    for (std::size_t k = 0; k < c.loads.size(); ++k) {
      const auto& a = c.loads[k];
      const auto& b = cfgs.front().loads[k];
      if (a.lambda != b.lambda || a.settle_steps != b.settle_steps || a.measure_steps != b.measure_steps) {
        throw ConfigError("compared configs use different load schedules");
      }
    }
  }
  std::vector<SweepResult> out;
  for (const auto& c : cfgs) out.push_back(load_sweep(c, progress));
  return out;
}

// ---------------------------------------------------------------------------
// Reports

std::string csv_header() {
  return "load,step_window,avg_e2e_delay,delivered,in_flight,algorithm,paradigm,seed,config_hash,pretrain_steps";
}

namespace {

void append_row(std::string& out, const WindowResult& w, const std::string& algorithm, const std::string& paradigm,
                std::uint64_t seed, const std::string& hash, long pretrain_steps) {
  out += format_double(w.lambda) + "," + format_double(w.window_start) + "-" + format_double(w.window_end) + "," +
         format_optional(w.avg_delay) + "," + std::to_string(w.delivered) + "," + std::to_string(w.in_flight) + "," +
         algorithm + "," + paradigm + "," + std::to_string(seed) + "," + hash + "," + std::to_string(pretrain_steps);
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows, bool with_header) {
  std::string out;
  if (with_header) out += csv_header() + "\n";
  for (const auto& r : rows) {
    append_row(out, r.window, r.algorithm, r.paradigm, r.seed, r.config_hash, r.pretrain_steps);
    out += "\n";
  }
  return out;
}

std::string pretrain_csv(const ExperimentConfig& cfg, const std::vector<PretrainReport>& reports) {
  std::string out = csv_header() + ",delay_with_in_flight,teacher_delay,teacher_converged\n";
  const std::string hash = config_hash(cfg);
  for (const auto& rep : reports) {
    for (const auto& p : rep.points) {
      append_row(out, p.eval, report_name(rep.algorithm), "centralized", rep.seed, hash, p.steps);
      out += "," + format_optional(p.eval.delay_with_in_flight) + "," +
             format_optional(rep.teacher_eval.delay_with_in_flight) + "," + (rep.teacher_converged ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string summary_csv(const std::vector<SweepResult>& results) {
  std::string out = "algorithm,paradigm,config_hash,level,load,mean_delay,var_delay,mean_in_flight,repetitions,bounded_runs\n";
  for (const auto& r : results) {
    for (const auto& s : r.summary) {
      out += r.algorithm + "," + r.paradigm + "," + r.config_hash + "," + std::to_string(s.level_index) + "," +
             format_double(s.lambda) + "," + format_optional(s.mean_delay) + "," + format_double(s.var_delay) + "," +
             format_double(s.mean_in_flight) + "," + std::to_string(s.repetitions) + "," +
             std::to_string(s.bounded_runs) + "\n";
    }
  }
  return out;
}

std::string summary_table(const std::vector<SweepResult>& results) {
  if (results.empty()) return {};
  std::vector<std::string> header{"algorithm/paradigm"};
  for (const auto& s : results.front().summary) {
    std::ostringstream h;
    h << "load " << s.lambda;
    header.push_back(h.str());
  }
  std::vector<std::vector<std::string>> table{header};
  for (const auto& r : results) {
    std::vector<std::string> line{r.algorithm + "/" + r.paradigm};
    for (const auto& s : r.summary) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3);
      if (s.mean_delay) {
        cell << *s.mean_delay << " +/- " << s.var_delay;
      } else {
        cell << "n/a";
      }
      if (s.bounded_runs < s.repetitions) cell << " *";
      line.push_back(cell.str());
    }
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c]) + 2) << line[c];
    }
    out << '\n';
  }
  out << "(* = in-flight count still growing in at least one repetition)\n";
  return out.str();
}

}  // namespace gatroute
