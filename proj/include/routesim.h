/*
 * routesim C API: similarity-routed cloud dispatch simulator.
 *
 * All entry points return rs_status; RS_OK means success. On failure,
 * rs_last_error() returns a thread-local human-readable message valid until
 * the next API call on the same thread. Handles are opaque and must be freed
 * with their matching *_free function.
 */
#ifndef ROUTESIM_H
#define ROUTESIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RS_API __declspec(dllexport)
#else
#define RS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
    RS_OK = 0,
    RS_ERR_PARSE = 1,      /* malformed document or frame */
    RS_ERR_VALIDATION = 2, /* document violates an invariant */
    RS_ERR_UNKNOWN_ID = 3, /* no such network/server */
    RS_ERR_IO = 4,
    RS_ERR_CONFIG = 5, /* bad parameters (zero intervals, unreadable paths) */
    RS_ERR_INTERNAL = 6
} rs_status;

typedef struct rs_topology rs_topology;

/* Exact similarity ratio; den >= 1, reduced. */
typedef struct rs_ratio {
    uint64_t num;
    uint64_t den;
} rs_ratio;

typedef struct rs_run_params {
    uint64_t seed;     /* drop RNG seed; used when seed_set != 0, else the plan's rng_seed */
    int seed_set;
    uint64_t timeout_ticks;    /* 0 = default 1000 */
    uint64_t monitor_interval; /* 0 = default 250 */
    uint64_t max_ticks;        /* 0 = default 10000000 */
} rs_run_params;

typedef struct rs_run_report {
    uint64_t jobs_submitted;
    uint64_t jobs_completed;
    uint64_t jobs_unschedulable;
    uint64_t jobs_incomplete;
    uint64_t rejected_at_submission;
    uint64_t failovers;
    uint64_t frames_sent;
    uint64_t frames_dropped;
    uint64_t propagation_rounds;
} rs_run_report;

RS_API const char* rs_status_name(rs_status status);
RS_API const char* rs_last_error(void);

RS_API rs_status rs_topology_load_text(const char* text, size_t len, rs_topology** out);
RS_API rs_status rs_topology_load_file(const char* path, rs_topology** out);
RS_API void rs_topology_free(rs_topology* topology);

RS_API rs_status rs_similarity_networks(const rs_topology* topology, const char* net_a,
                                        const char* net_b, rs_ratio* out);
RS_API rs_status rs_similarity_servers(const rs_topology* topology, const char* net_a,
                                       const char* srv_a, const char* net_b, const char* srv_b,
                                       rs_ratio* out);

/*
 * Runs a scenario end to end. Writes trace.txt, metrics.txt, log.txt and the
 * per-IP output files under out_dir. fault_plan_path and params may be NULL;
 * report may be NULL when only the artifacts matter.
 */
RS_API rs_status rs_run_scenario(const char* topology_path, const char* workload_path,
                                 const char* fault_plan_path, const rs_run_params* params,
                                 const char* out_dir, rs_run_report* report);

/*
 * Scans a log file for missing links at virtual time `now`. *out_lines gets a
 * malloc'd buffer of "MISSING <ip> <app> <internal_ip> <recv>/<expected>"
 * lines (empty string when none); free it with rs_string_free.
 */
RS_API rs_status rs_log_scan_file(const char* log_path, uint64_t now, uint64_t timeout_ticks,
                                  char** out_lines, uint64_t* out_missing_count);
RS_API void rs_string_free(char* text);

/*
 * Re-runs the scenario recorded in a trace file (inputs must match the
 * digests in the trace header) and compares byte-for-byte.
 * *out_identical is 1 on an exact match, 0 otherwise.
 */
RS_API rs_status rs_replay_verify(const char* topology_path, const char* workload_path,
                                  const char* fault_plan_path, const char* trace_path,
                                  int* out_identical);

#ifdef __cplusplus
}
#endif

#endif /* ROUTESIM_H */
