#ifndef SIZESCHED_H
#define SIZESCHED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum SizeschedStatus {
  SIZESCHED_STATUS_OK = 0,
  SIZESCHED_STATUS_NULL_POINTER = 1,
  SIZESCHED_STATUS_INVALID_ARGUMENT = 2,
  SIZESCHED_STATUS_UNKNOWN_POLICY = 3,
  SIZESCHED_STATUS_INVALID_WORKLOAD = 4,
  SIZESCHED_STATUS_SIMULATION_FAILED = 5,
  SIZESCHED_STATUS_IO = 6,
  SIZESCHED_STATUS_PANIC = 7,
} SizeschedStatus;

/**
 * Opaque per-job results of one simulation, in workload order.
 */
typedef struct SizeschedOutcomes SizeschedOutcomes;

/**
 * Opaque validated workload.
 */
typedef struct SizeschedWorkload SizeschedWorkload;

typedef struct SizeschedJob {
  uint64_t id;
  double arrival;
  double size;
  double estimate;
} SizeschedJob;

typedef struct SizeschedOutcome {
  uint64_t job_id;
  double arrival;
  double size;
  double completion;
  double sojourn;
  double slowdown;
} SizeschedOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful one. Valid until the next call into this library.
 */
const char *sizesched_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sizesched_version(void);

size_t sizesched_policy_count(void);

/**
 * Name of the `index`-th policy (static string), or NULL when out of range.
 */
const char *sizesched_policy_name(size_t index);

/**
 * Draws a synthetic workload. Same parameters and seed give the same jobs.
 *
 * `out` must be valid for writing a handle pointer.
 */
enum SizeschedStatus sizesched_workload_generate(double shape,
                                                 double timeshape,
                                                 double sigma,
                                                 double load,
                                                 size_t njobs,
                                                 uint64_t seed,
                                                 struct SizeschedWorkload **out);

/**
 * Builds a workload from `len` caller-supplied jobs, validating and sorting
 * them by (arrival, id).
 *
 * `jobs` must point to `len` readable jobs (it may be NULL when `len` is
 * 0) and `out` must be valid for writing a handle pointer.
 */
enum SizeschedStatus sizesched_workload_from_jobs(const struct SizeschedJob *jobs,
                                                  size_t len,
                                                  struct SizeschedWorkload **out);

/**
 * Loads a trace CSV (`job_id,arrival,size[,estimate]`); missing estimates
 * are drawn with log-normal error `sigma` from `seed`.
 *
 * `path` must be a NUL-terminated string and `out` valid for writing.
 */
enum SizeschedStatus sizesched_workload_load_trace(const char *path,
                                                   double sigma,
                                                   uint64_t seed,
                                                   struct SizeschedWorkload **out);

/**
 * Number of jobs, or 0 for a NULL handle.
 *
 * `workload` must be NULL or a live handle.
 */
size_t sizesched_workload_len(const struct SizeschedWorkload *workload);

/**
 * Copies the `index`-th job (in (arrival, id) order) into `out`.
 *
 * `workload` must be a live handle and `out` valid for writing.
 */
enum SizeschedStatus sizesched_workload_job(const struct SizeschedWorkload *workload,
                                            size_t index,
                                            struct SizeschedJob *out);

/**
 * Releases a workload handle. NULL is ignored.
 *
 * `workload` must be NULL or a handle not yet freed.
 */
void sizesched_workload_free(struct SizeschedWorkload *workload);

/**
 * Simulates `workload` under the named policy (case-insensitive, see
 * `sizesched_policy_name`).
 *
 * `workload` must be a live handle, `policy` a NUL-terminated string and
 * `out` valid for writing a handle pointer.
 */
enum SizeschedStatus sizesched_simulate(const struct SizeschedWorkload *workload,
                                        const char *policy,
                                        struct SizeschedOutcomes **out);

/**
 * Number of outcomes, or 0 for a NULL handle.
 *
 * `outcomes` must be NULL or a live handle.
 */
size_t sizesched_outcomes_len(const struct SizeschedOutcomes *outcomes);

/**
 * Copies the `index`-th outcome (same order as the workload's jobs).
 *
 * `outcomes` must be a live handle and `out` valid for writing.
 */
enum SizeschedStatus sizesched_outcomes_get(const struct SizeschedOutcomes *outcomes,
                                            size_t index,
                                            struct SizeschedOutcome *out);

/**
 * Mean sojourn time over all jobs.
 *
 * `outcomes` must be a live handle and `out` valid for writing.
 */
enum SizeschedStatus sizesched_outcomes_mean_sojourn(const struct SizeschedOutcomes *outcomes,
                                                     double *out);

/**
 * Releases an outcomes handle. NULL is ignored.
 *
 * `outcomes` must be NULL or a handle not yet freed.
 */
void sizesched_outcomes_free(struct SizeschedOutcomes *outcomes);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIZESCHED_H */
