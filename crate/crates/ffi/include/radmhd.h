#ifndef RADMHD_H
#define RADMHD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RMHD_OK 0

#define RMHD_ERR_NULL -1

#define RMHD_ERR_UTF8 -2

#define RMHD_ERR_CONFIG -3

#define RMHD_ERR_DOMAIN -4

#define RMHD_ERR_NUMERICAL -5

#define RMHD_ERR_INVARIANT -6

#define RMHD_ERR_IO -7

#define RMHD_ERR_BUFFER -8

#define RMHD_ERR_PANIC -9

#define RMHD_STATUS_RUNNING 0

#define RMHD_STATUS_COMPLETED 1

#define RMHD_STATUS_BLOWUP_DETECTED 2

#define RMHD_STATUS_INVALIDATED 3

#define RMHD_STATUS_ERROR 4

#define RMHD_GEOMETRY_DISK2D 0

#define RMHD_GEOMETRY_CYLINDER3D 1

#define RMHD_GEOMETRY_DISK2D_FREE 2

/**
 * Opaque run handle.
 */
typedef struct RmhdRun RmhdRun;

/**
 * One diagnostics record. Quantities that do not apply to the run are NaN.
 */
typedef struct RmhdRecord {
  double t;
  double energy;
  double dissipation_cum;
  double flux_vacuum;
  double r_front;
  double a_boundary;
  double div_l2;
  double div_lower_bound;
  double max_gradu;
  double dt;
} RmhdRecord;

/**
 * Inputs of the lifespan bound. `r_ref` is the wall radius, or the envelope
 * constant for the free surface.
 */
typedef struct RmhdBoundInputs {
  double mu;
  double lambda;
  double r_ref;
  double c0;
  double e0;
  double alpha;
  int32_t geometry;
} RmhdBoundInputs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a run from configuration text (`section.key = value` lines).
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
int32_t rmhd_run_new(const char *config, struct RmhdRun **out);

/**
 * Create a run from a built-in preset.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
int32_t rmhd_run_from_preset(const char *name, struct RmhdRun **out);

/**
 * Apply a `key=value` override and rebuild the run from its initial data.
 *
 * # Safety
 * `run` must come from this library and `assignment` be a NUL-terminated string.
 */
int32_t rmhd_run_override(struct RmhdRun *run, const char *assignment);

/**
 * Release a run. Null is ignored.
 *
 * # Safety
 * `run` must come from this library and not be used afterwards.
 */
void rmhd_run_free(struct RmhdRun *run);

/**
 * Advance by one step and report the run status.
 *
 * # Safety
 * `run` must come from this library and `status` be a valid pointer.
 */
int32_t rmhd_run_step(struct RmhdRun *run, int32_t *status);

/**
 * Advance until the run ends and report the final status.
 *
 * # Safety
 * `run` must come from this library and `status` be a valid pointer.
 */
int32_t rmhd_run_to_end(struct RmhdRun *run, int32_t *status);

/**
 * Current simulation time.
 *
 * # Safety
 * `run` must come from this library and `t` be a valid pointer.
 */
int32_t rmhd_run_time(struct RmhdRun *run, double *t);

/**
 * Most recent diagnostics record.
 *
 * # Safety
 * `run` must come from this library and `out` be a valid pointer.
 */
int32_t rmhd_run_latest(struct RmhdRun *run, struct RmhdRecord *out);

/**
 * Number of records in the run history.
 *
 * # Safety
 * `run` must come from this library and `len` be a valid pointer.
 */
int32_t rmhd_run_history_len(struct RmhdRun *run, size_t *len);

/**
 * Record `index` of the run history.
 *
 * # Safety
 * `run` must come from this library and `out` be a valid pointer.
 */
int32_t rmhd_run_record(struct RmhdRun *run, size_t index, struct RmhdRecord *out);

/**
 * Run summary as JSON.
 *
 * # Safety
 * `run` must come from this library; `buf` must hold `cap` bytes.
 */
int32_t rmhd_run_json(struct RmhdRun *run, char *buf, size_t cap, size_t *needed);

/**
 * Lifespan bound at the given exponent; `+inf` without flux.
 *
 * # Safety
 * `inputs` and `t` must be valid pointers.
 */
int32_t rmhd_lifespan_bound(const struct RmhdBoundInputs *inputs, double *t);

/**
 * Minimize the lifespan bound over the admissible exponents. The `alpha`
 * field of `inputs` is ignored.
 *
 * # Safety
 * `inputs`, `alpha` and `t` must be valid pointers.
 */
int32_t rmhd_optimize_alpha(const struct RmhdBoundInputs *inputs, double *alpha, double *t);

/**
 * Message of the last failure on this thread, with the same buffer
 * protocol as [`rmhd_run_json`]. Empty before any failure.
 *
 * # Safety
 * `buf` must hold `cap` bytes.
 */
int32_t rmhd_last_error_message(char *buf, size_t cap, size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADMHD_H */
