#ifndef QOSROUTE_H
#define QOSROUTE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed topology or scenario text.
   */
  QR_STATUS_PARSE = 3,
  QR_STATUS_INVALID_ARGUMENT = 4,
  /**
   * Index past the end of a handle's contents.
   */
  QR_STATUS_OUT_OF_RANGE = 5,
  QR_STATUS_IO = 6,
  QR_STATUS_SIMULATION = 7,
  /**
   * The buffer passed in is too small; the needed length was written.
   */
  QR_STATUS_BUFFER_TOO_SMALL = 8,
  /**
   * A Rust panic was caught at the boundary.
   */
  QR_STATUS_INTERNAL = 9,
} QrStatus;

/**
 * Routing policy selector.
 */
typedef enum QrPolicy {
  QR_POLICY_SPF = 0,
  QR_POLICY_SOMR = 1,
  QR_POLICY_KSPQR = 2,
  QR_POLICY_KOQRA = 3,
} QrPolicy;

/**
 * Network topology.
 */
typedef struct QrGraph QrGraph;

/**
 * Candidate paths for one source and destination, cheapest first.
 */
typedef struct QrPaths QrPaths;

/**
 * Outcome of one simulation run.
 */
typedef struct QrRun QrRun;

/**
 * Scenario file with its topology loaded and candidates precomputed.
 */
typedef struct QrScenario QrScenario;

/**
 * One metrics window of a run.
 */
typedef struct QrWindow {
  double start_s;
  double end_s;
  /**
   * NaN when no data packet was delivered in the window.
   */
  double mean_delay_s;
  uint64_t delivered;
  uint64_t dropped;
  uint64_t control_bits;
} QrWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failed call on this thread, or null when the last
 * call succeeded. Valid until the next call on the same thread.
 */
const char *qr_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *qr_version(void);

/**
 * Parses topology text.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` writable.
 */
enum QrStatus qr_graph_from_text(const char *text, struct QrGraph **out);

/**
 * Reads and parses a topology file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` writable.
 */
enum QrStatus qr_graph_from_file(const char *path, struct QrGraph **out);

/**
 * # Safety
 * `graph` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void qr_graph_free(struct QrGraph *graph);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t qr_graph_node_count(const struct QrGraph *graph);

/**
 * Number of directed links; 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t qr_graph_link_count(const struct QrGraph *graph);

/**
 * Counts broken invariants, including missing strong connectivity. The
 * first one is also left as the thread's error message.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
enum QrStatus qr_graph_violation_count(const struct QrGraph *graph, size_t *out);

/**
 * The `k` cheapest loopless paths from `source` to `destination`. Pass a
 * null `coefficients` with `coefficient_count` 0 for unit coefficients.
 *
 * # Safety
 * `graph` must be a live handle, `coefficients` must point to
 * `coefficient_count` doubles and `out` must be writable.
 */
enum QrStatus qr_k_shortest_paths(const struct QrGraph *graph,
                                  size_t source,
                                  size_t destination,
                                  size_t k,
                                  const double *coefficients,
                                  size_t coefficient_count,
                                  struct QrPaths **out);

/**
 * # Safety
 * `paths` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void qr_paths_free(struct QrPaths *paths);

/**
 * Number of paths in the set; 0 for a null handle or an unreachable
 * destination.
 *
 * # Safety
 * `paths` must be null or a live handle.
 */
size_t qr_paths_count(const struct QrPaths *paths);

/**
 * Static cost of path `index`.
 *
 * # Safety
 * `paths` must be a live handle and `out` writable.
 */
enum QrStatus qr_path_cost(const struct QrPaths *paths, size_t index, double *out);

/**
 * Copies the node sequence of path `index` into `buffer` and stores its
 * length in `length`. When `capacity` is too small nothing is copied, the
 * needed length is stored and `BufferTooSmall` is returned.
 *
 * # Safety
 * `paths` must be a live handle, `buffer` must hold `capacity` entries and
 * `length` must be writable.
 */
enum QrStatus qr_path_nodes(const struct QrPaths *paths,
                            size_t index,
                            size_t *buffer,
                            size_t capacity,
                            size_t *length);

/**
 * Path-selection probabilities with `p_max` on the lowest delay estimate.
 *
 * # Safety
 * `estimates` and `out` must each hold `count` doubles.
 */
enum QrStatus qr_kspqr_distribution(const double *estimates,
                                    size_t count,
                                    double p_max,
                                    double *out);

/**
 * Path-selection probabilities proportional to
 * `(estimate + beta * waiting)^-alpha`.
 *
 * # Safety
 * `estimates`, `waiting` and `out` must each hold `count` doubles.
 */
enum QrStatus qr_koqra_distribution(const double *estimates,
                                    const double *waiting,
                                    size_t count,
                                    double alpha,
                                    double beta,
                                    double *out);

/**
 * Loads a scenario file, its topology and the candidate paths.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` writable.
 */
enum QrStatus qr_scenario_load(const char *path, struct QrScenario **out);

/**
 * # Safety
 * `scenario` must come from this library and not be used afterwards. Null
 * is ignored.
 */
void qr_scenario_free(struct QrScenario *scenario);

/**
 * Simulates the scenario once under `policy` with `seed`.
 *
 * # Safety
 * `scenario` must be a live handle and `out` writable.
 */
enum QrStatus qr_scenario_run(const struct QrScenario *scenario,
                              enum QrPolicy policy,
                              uint64_t seed,
                              struct QrRun **out);

/**
 * # Safety
 * `run` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void qr_run_free(struct QrRun *run);

/**
 * Number of metrics windows; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t qr_run_window_count(const struct QrRun *run);

/**
 * Copies window `index`.
 *
 * # Safety
 * `run` must be a live handle and `out` writable.
 */
enum QrStatus qr_run_window(const struct QrRun *run, size_t index, struct QrWindow *out);

/**
 * Mean delay over every delivered data packet; NaN when none were.
 *
 * # Safety
 * `run` must be a live handle and `out` writable.
 */
enum QrStatus qr_run_mean_delay(const struct QrRun *run, double *out);

/**
 * The run as CSV text. Release the string with [`qr_string_free`].
 *
 * # Safety
 * `run` must be a live handle and `out` writable.
 */
enum QrStatus qr_run_csv(const struct QrRun *run, char **out);

/**
 * # Safety
 * `s` must come from [`qr_run_csv`] and not be used afterwards. Null is
 * ignored.
 */
void qr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QOSROUTE_H */
