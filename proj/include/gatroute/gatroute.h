/* Copyright (c) 2026 The gatroute Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the gatroute routing simulator and learners.
 *
 * Every object is an opaque handle released with its *_free function. Calls
 * return a gr_status; on failure gr_last_error() describes the problem for
 * the calling thread. Strings handed out by a handle stay valid until the
 * handle is freed.
 */
#ifndef GATROUTE_GATROUTE_H
#define GATROUTE_GATROUTE_H

#include <stddef.h>
#include <stdint.h>

#if defined(GR_BUILDING_LIBRARY)
#define GR_API __attribute__((visibility("default")))
#else
#define GR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gr_status {
  GR_OK = 0,
  GR_ERR_INVALID_ARGUMENT = 1, /* null handle, out-of-range index */
  GR_ERR_PARSE = 2,            /* malformed topology text */
  GR_ERR_CONFIG = 3,           /* bad experiment config */
  GR_ERR_CONTRACT = 4,         /* precondition violated inside the engine */
  GR_ERR_IO = 5,
  GR_ERR_INTERNAL = 6
} gr_status;

typedef struct gr_topology gr_topology;
typedef struct gr_config gr_config;
typedef struct gr_report gr_report;
typedef struct gr_sim gr_sim;

GR_API const char* gr_version(void);
/* Message of the last failed call on this thread ("" if none). */
GR_API const char* gr_last_error(void);
/* Line number for the last GR_ERR_PARSE, 0 otherwise. */
GR_API int gr_last_error_line(void);

/* Progress messages from long runs; pass NULL to silence. */
typedef void (*gr_progress_fn)(const char* message, void* user);
GR_API void gr_set_progress(gr_progress_fn fn, void* user);

/* ---- topology ---------------------------------------------------------- */

GR_API gr_status gr_topology_parse(const char* text, gr_topology** out);
GR_API gr_status gr_topology_load(const char* path, gr_topology** out);
GR_API gr_status gr_topology_grid(int rows, int cols, gr_topology** out);
GR_API void gr_topology_free(gr_topology* t);
GR_API int gr_topology_node_count(const gr_topology* t);
/* Writes up to cap neighbor ids; *count receives the full degree. */
GR_API gr_status gr_topology_neighbors(const gr_topology* t, int node, int* out, size_t cap, size_t* count);
/* Hop distance, or -1 when dst is unreachable. */
GR_API gr_status gr_topology_hops(const gr_topology* t, int src, int dst, int* hops);
/* Entry W[i][j] of the uniform consensus matrix. */
GR_API gr_status gr_topology_consensus_weight(const gr_topology* t, int i, int j, double* weight);
/* Canonical text form; valid until the next call on this thread. */
GR_API const char* gr_topology_text(const gr_topology* t);

/* ---- experiment configs ----------------------------------------------- */

GR_API gr_status gr_config_load(const char* path, gr_config** out);
/* base_dir resolves relative topology paths; may be NULL. */
GR_API gr_status gr_config_parse(const char* json, const char* base_dir, gr_config** out);
GR_API void gr_config_free(gr_config* cfg);
GR_API gr_status gr_config_set_seed(gr_config* cfg, uint64_t seed);
/* File path (relative to the working directory) or grid:RxC[:u-v,...]. */
GR_API gr_status gr_config_set_topology(gr_config* cfg, const char* source);
GR_API gr_status gr_config_set_pretrain_steps(gr_config* cfg, long steps);
/* Writes 16 hex digits plus a terminator into buf (size >= 17). */
GR_API gr_status gr_config_hash(const gr_config* cfg, char* buf, size_t size);

/* ---- experiments ------------------------------------------------------- */

GR_API gr_status gr_run_sweep(const gr_config* cfg, gr_report** out);
/* Pre-trains for `steps` updates and evaluates at the pre-training load. */
GR_API gr_status gr_run_pretrain(const gr_config* cfg, long steps, gr_report** out);
GR_API gr_status gr_run_compare(const gr_config* const* cfgs, size_t count, gr_report** out);
GR_API const char* gr_report_csv(const gr_report* r);
/* Per-level mean/variance table (CSV) and its human-readable rendering. */
GR_API const char* gr_report_summary_csv(const gr_report* r);
GR_API const char* gr_report_summary_text(const gr_report* r);
GR_API void gr_report_free(gr_report* r);

/* ---- interactive simulation ------------------------------------------- */

typedef struct gr_sim_stats {
  double now;
  uint64_t injected;
  uint64_t delivered;
  uint64_t in_flight;
  double avg_delay; /* NaN before the first delivery */
} gr_sim_stats;

/* algorithm: shortest | global | qrouting | dqn | dgatr (centralized). */
GR_API gr_status gr_sim_create(const gr_topology* t, const char* algorithm, double load, uint64_t seed, gr_sim** out);
GR_API void gr_sim_free(gr_sim* sim);
GR_API gr_status gr_sim_inject(gr_sim* sim, int src, int dst);
GR_API gr_status gr_sim_set_load(gr_sim* sim, double load);
GR_API gr_status gr_sim_set_learning(gr_sim* sim, int on);
GR_API gr_status gr_sim_run(gr_sim* sim, long steps);
GR_API gr_status gr_sim_stats_get(const gr_sim* sim, gr_sim_stats* out);
/* Greedy next hop the agent would choose at `node` for `dst`. */
GR_API gr_status gr_sim_next_hop(const gr_sim* sim, int node, int dst, int* next);

#ifdef __cplusplus
}
#endif

#endif /* GATROUTE_GATROUTE_H */
