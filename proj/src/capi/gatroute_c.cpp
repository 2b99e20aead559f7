// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/gatroute.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>

#include "gatroute/error.hpp"
#include "gatroute/harness.hpp"

using namespace gatroute;

struct gr_topology {
  Topology t;
};

struct gr_config {
  ExperimentConfig cfg;
};

struct gr_report {
  std::string csv;
  std::string summary_csv;
  std::string summary_text;
};

struct gr_sim {
  Topology t;
  std::unique_ptr<Simulator> sim;
  std::unique_ptr<RoutingAgent> agent;
};

namespace {

thread_local std::string last_error;
thread_local int last_error_line = 0;
thread_local std::string text_buffer;

gr_progress_fn progress_fn = nullptr;
void* progress_user = nullptr;

gr_status fail(gr_status status, std::string message, int line = 0) {
  last_error = std::move(message);
  last_error_line = line;
  return status;
}

template <class F>
gr_status guarded(F&& body) {
  last_error.clear();
  last_error_line = 0;
  try {
    body();
    return GR_OK;
  } catch (const ParseError& e) {
    return fail(GR_ERR_PARSE, e.what(), e.line());
  } catch (const ConfigError& e) {
    return fail(GR_ERR_CONFIG, e.what());
  } catch (const ContractViolation& e) {
    return fail(GR_ERR_CONTRACT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GR_ERR_INTERNAL, e.what());
  }
}

ProgressFn progress() {
  if (!progress_fn) return {};
  return [](std::string_view msg) { progress_fn(std::string(msg).c_str(), progress_user); };
}

bool valid_node(const Topology& t, int n) { return n >= 0 && n < t.node_count(); }

}  // namespace

extern "C" {

const char* gr_version(void) { return "0.1.0"; }
const char* gr_last_error(void) { return last_error.c_str(); }
int gr_last_error_line(void) { return last_error_line; }

void gr_set_progress(gr_progress_fn fn, void* user) {
  progress_fn = fn;
  progress_user = user;
}

gr_status gr_topology_parse(const char* text, gr_topology** out) {
  if (!text || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new gr_topology{load_topology(text)}; });
}

gr_status gr_topology_load(const char* path, gr_topology** out) {
  if (!path || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (!std::filesystem::exists(path)) return fail(GR_ERR_IO, std::string("cannot open ") + path);
  return guarded([&] { *out = new gr_topology{load_topology_file(path)}; });
}

gr_status gr_topology_grid(int rows, int cols, gr_topology** out) {
  if (!out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new gr_topology{grid_topology(rows, cols)}; });
}

void gr_topology_free(gr_topology* t) { delete t; }

int gr_topology_node_count(const gr_topology* t) { return t ? t->t.node_count() : 0; }

gr_status gr_topology_neighbors(const gr_topology* t, int node, int* out, size_t cap, size_t* count) {
  if (!t || (!out && cap > 0)) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (!valid_node(t->t, node)) return fail(GR_ERR_INVALID_ARGUMENT, "node out of range");
  auto nb = t->t.neighbors(node);
  for (size_t k = 0; k < nb.size() && k < cap; ++k) out[k] = nb[k];
  if (count) *count = nb.size();
  return GR_OK;
}

gr_status gr_topology_hops(const gr_topology* t, int src, int dst, int* hops) {
  if (!t || !hops) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (!valid_node(t->t, src) || !valid_node(t->t, dst)) return fail(GR_ERR_INVALID_ARGUMENT, "node out of range");
  return guarded([&] {
    int h = shortest_hops(t->t, src)[static_cast<std::size_t>(dst)];
    *hops = h == kUnreachable ? -1 : h;
  });
}

gr_status gr_topology_consensus_weight(const gr_topology* t, int i, int j, double* weight) {
  if (!t || !weight) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (!valid_node(t->t, i) || !valid_node(t->t, j)) return fail(GR_ERR_INVALID_ARGUMENT, "node out of range");
  return guarded([&] { *weight = consensus_matrix(t->t)(i, j); });
}

const char* gr_topology_text(const gr_topology* t) {
  if (!t) return "";
  text_buffer = to_text(t->t);
  return text_buffer.c_str();
}

gr_status gr_config_load(const char* path, gr_config** out) {
  if (!path || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (!std::filesystem::exists(path)) return fail(GR_ERR_IO, std::string("cannot open ") + path);
  return guarded([&] { *out = new gr_config{load_config_file(path)}; });
}

gr_status gr_config_parse(const char* json, const char* base_dir, gr_config** out) {
  if (!json || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new gr_config{parse_config(json, base_dir ? base_dir : "")}; });
}

void gr_config_free(gr_config* cfg) { delete cfg; }

gr_status gr_config_set_seed(gr_config* cfg, uint64_t seed) {
  if (!cfg) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  cfg->cfg.seed = seed;
  return GR_OK;
}

gr_status gr_config_set_topology(gr_config* cfg, const char* source) {
  if (!cfg || !source) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ExperimentConfig next = cfg->cfg;
    next.topology = source;
    next.base_dir.clear();
    resolve_topology(next);  // reject unusable sources up front
    cfg->cfg = std::move(next);
  });
}

gr_status gr_config_set_pretrain_steps(gr_config* cfg, long steps) {
  if (!cfg) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (steps < 0) return fail(GR_ERR_CONFIG, "pre-train steps must be non-negative");
  cfg->cfg.pretrain.steps = steps;
  return GR_OK;
}

gr_status gr_config_hash(const gr_config* cfg, char* buf, size_t size) {
  if (!cfg || !buf) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (size < 17) return fail(GR_ERR_INVALID_ARGUMENT, "hash buffer needs 17 bytes");
  return guarded([&] {
    auto h = config_hash(cfg->cfg);
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

gr_status gr_run_sweep(const gr_config* cfg, gr_report** out) {
  if (!cfg || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<SweepResult> results{load_sweep(cfg->cfg, progress())};
    *out = new gr_report{to_csv(results.front().rows), summary_csv(results), summary_table(results)};
  });
}

gr_status gr_run_pretrain(const gr_config* cfg, long steps, gr_report** out) {
  if (!cfg || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (steps < 0) return fail(GR_ERR_CONFIG, "pre-train steps must be non-negative");
  return guarded([&] {
    std::vector<PretrainReport> reports;
    for (int rep = 0; rep < cfg->cfg.repetitions; ++rep) {
      reports.push_back(pretrain(cfg->cfg, {steps}, cfg->cfg.seed + static_cast<std::uint64_t>(rep), progress()));
    }
    std::string text;
    for (const auto& r : reports) {
      text += "seed " + std::to_string(r.seed) + ": teacher " + (r.teacher_converged ? "converged" : "NOT converged") +
              " after " + std::to_string(r.teacher_steps) + " steps\n";
    }
    *out = new gr_report{pretrain_csv(cfg->cfg, reports), std::string(), text};
  });
}

gr_status gr_run_compare(const gr_config* const* cfgs, size_t count, gr_report** out) {
  if (!cfgs || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  std::vector<ExperimentConfig> list;
  for (size_t k = 0; k < count; ++k) {
    if (!cfgs[k]) return fail(GR_ERR_INVALID_ARGUMENT, "null config");
    list.push_back(cfgs[k]->cfg);
  }
  return guarded([&] {
    auto results = compare(list, progress());
    std::string csv = csv_header() + "\n";
    for (const auto& r : results) csv += to_csv(r.rows, false);
    *out = new gr_report{csv, summary_csv(results), summary_table(results)};
  });
}

const char* gr_report_csv(const gr_report* r) { return r ? r->csv.c_str() : ""; }
const char* gr_report_summary_csv(const gr_report* r) { return r ? r->summary_csv.c_str() : ""; }
const char* gr_report_summary_text(const gr_report* r) { return r ? r->summary_text.c_str() : ""; }
void gr_report_free(gr_report* r) { delete r; }

gr_status gr_sim_create(const gr_topology* t, const char* algorithm, double load, uint64_t seed, gr_sim** out) {
  if (!t || !algorithm || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto s = std::make_unique<gr_sim>();
    s->t = t->t;
    ExperimentConfig cfg;
    cfg.algorithm = parse_algorithm(algorithm);
    s->sim = std::make_unique<Simulator>(s->t, TrafficConfig{load, seed, 1.0});
    s->agent = make_agent(cfg, s->t, seed);
    *out = s.release();
  });
}

void gr_sim_free(gr_sim* sim) { delete sim; }

gr_status gr_sim_inject(gr_sim* sim, int src, int dst) {
  if (!sim) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { sim->sim->inject(src, dst); });
}

gr_status gr_sim_set_load(gr_sim* sim, double load) {
  if (!sim) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { sim->sim->set_load(load); });
}

gr_status gr_sim_set_learning(gr_sim* sim, int on) {
  if (!sim) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  sim->agent->set_learning(on != 0);
  return GR_OK;
}

gr_status gr_sim_run(gr_sim* sim, long steps) {
  if (!sim) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (steps < 0) return fail(GR_ERR_INVALID_ARGUMENT, "steps must be non-negative");
  return guarded([&] { run_steps(*sim->sim, *sim->agent, steps); });
}

gr_status gr_sim_stats_get(const gr_sim* sim, gr_sim_stats* out) {
  if (!sim || !out) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  const auto& m = sim->sim->metrics();
  out->now = sim->sim->now();
  out->injected = sim->sim->injected_count();
  out->delivered = m.delivered_count();
  out->in_flight = sim->sim->in_flight();
  out->avg_delay = m.average_delay().value_or(std::numeric_limits<double>::quiet_NaN());
  return GR_OK;
}

gr_status gr_sim_next_hop(const gr_sim* sim, int node, int dst, int* next) {
  if (!sim || !next) return fail(GR_ERR_INVALID_ARGUMENT, "null argument");
  if (!valid_node(sim->t, node) || !valid_node(sim->t, dst) || node == dst) {
    return fail(GR_ERR_INVALID_ARGUMENT, "need distinct in-range nodes");
  }
  return guarded([&] {
    Packet p;
    p.src = node;
    p.dst = dst;
    p.current_node = node;
    p.birth_time = p.enqueue_time = sim->sim->now();
    const bool was = sim->agent->learning();
    sim->agent->set_learning(false);
    *next = sim->agent->route(*sim->sim, p);
    sim->agent->set_learning(was);
  });
}

}  // extern "C"
