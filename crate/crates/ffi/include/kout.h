#ifndef KOUT_H
#define KOUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible entry point.
 */
typedef enum KoutStatus {
  KOUT_STATUS_OK = 0,
  KOUT_STATUS_NULL_POINTER = 1,
  KOUT_STATUS_INVALID_PARAMS = 2,
  KOUT_STATUS_INVALID_ARGUMENT = 3,
  KOUT_STATUS_TOO_LARGE = 4,
  KOUT_STATUS_INTERNAL = 5,
} KoutStatus;

/**
 * One sampled graph.
 */
typedef struct KoutGraph KoutGraph;

/**
 * Validated model parameters.
 */
typedef struct KoutParams KoutParams;

typedef struct KoutLowerBound {
  double value;
  bool valid;
  bool nontrivial;
} KoutLowerBound;

typedef struct KoutCensus {
  bool connected;
  size_t num_components;
  size_t largest_component;
  /**
   * Isolated class-1 mutual pairs.
   */
  size_t y_count;
} KoutCensus;

typedef struct KoutSimulation {
  uint64_t trials;
  uint64_t connected_trials;
  double p_connected;
  /**
   * 95% Wilson interval.
   */
  double ci_low;
  double ci_high;
  double mean_y;
  double p_y_zero;
  double mean_edges;
} KoutSimulation;

typedef struct KoutExact {
  double p_connected;
  double e_y;
  double p_y_zero;
  uint64_t state_count;
  /**
   * True when the values came from exact rational arithmetic.
   */
  bool rational;
} KoutExact;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *kout_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *kout_version(void);

/**
 * Validates `(n, mu, k)` with `num_classes` entries in each array.
 *
 * # Safety
 * `mu` and `k` must point to `num_classes` readable values; `out` must be
 * writable.
 */
enum KoutStatus kout_params_new(uint64_t n,
                                const double *mu,
                                const uint64_t *k,
                                size_t num_classes,
                                struct KoutParams **out);

/**
 * # Safety
 * `params` must come from [`kout_params_new`] and not be freed twice.
 */
void kout_params_free(struct KoutParams *params);

/**
 * # Safety
 * `params` must be a live handle or null.
 */
uint64_t kout_params_n(const struct KoutParams *params);

/**
 * # Safety
 * `params` must be a live handle or null.
 */
double kout_params_k_avg(const struct KoutParams *params);

/**
 * Probability that two fixed nodes are adjacent.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_edge_probability(const struct KoutParams *params, double *out);

/**
 * `C(mu, K)`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_c_value(const struct KoutParams *params, double *out);

/**
 * Asymptotic connectivity upper bound `1 - C`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_upper_bound(const struct KoutParams *params, double *out);

/**
 * Union bound on the disconnection probability, clamped to `[0, 1]`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_union_bound(const struct KoutParams *params, double *out);

/**
 * Exact expected number of isolated class-1 pairs.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_expected_isolated_pairs(const struct KoutParams *params, double *out);

/**
 * `1 - E[Y]^2 / E[Y^2]`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_second_moment_bound(const struct KoutParams *params, double *out);

/**
 * Explicit one-law lower bound and its validity flags.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_one_law_lower_bound(const struct KoutParams *params,
                                         struct KoutLowerBound *out);

/**
 * Smallest `K_r` giving a non-trivial one-law lower bound at `mu_tilde`.
 *
 * # Safety
 * `out` must be writable.
 */
enum KoutStatus kout_k_star(double mu_tilde, uint64_t *out);

/**
 * Full bound report as a JSON string, released with [`kout_string_free`].
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_bounds_json(const struct KoutParams *params, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void kout_string_free(char *s);

/**
 * Samples trial `trial_index` of the stream seeded by `master_seed`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_graph_build(const struct KoutParams *params,
                                 uint64_t master_seed,
                                 uint64_t trial_index,
                                 struct KoutGraph **out);

/**
 * # Safety
 * `graph` must come from [`kout_graph_build`] and not be freed twice.
 */
void kout_graph_free(struct KoutGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t kout_graph_num_nodes(const struct KoutGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
size_t kout_graph_num_edges(const struct KoutGraph *graph);

/**
 * 0-based class of `node`.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_graph_class(const struct KoutGraph *graph, size_t node, uint32_t *out);

/**
 * Sorted neighbors of `node`. The array is owned by the graph and valid
 * until it is freed.
 *
 * # Safety
 * `graph` must be a live handle; `out` and `len` must be writable.
 */
enum KoutStatus kout_graph_neighbors(const struct KoutGraph *graph,
                                     size_t node,
                                     const uint32_t **out,
                                     size_t *len);

/**
 * # Safety
 * `graph` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_graph_census(const struct KoutGraph *graph, struct KoutCensus *out);

/**
 * Monte Carlo over `trials` graphs. `workers == 0` uses the default pool
 * size; results do not depend on it.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_simulate(const struct KoutParams *params,
                              uint64_t trials,
                              uint64_t master_seed,
                              size_t workers,
                              struct KoutSimulation *out);

/**
 * Exact probabilities by enumeration; `KOUT_STATUS_TOO_LARGE` when the
 * instance is beyond the enumeration limit.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum KoutStatus kout_oracle(const struct KoutParams *params, struct KoutExact *out);

/**
 * Copies the last error into `buf` (nul-terminated, truncated to `cap`) and
 * returns the full message length, or 0 when there is none.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null with `cap == 0`.
 */
size_t kout_last_error_copy(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOUT_H */
