#ifndef LAMBDA_CAPACITY_H
#define LAMBDA_CAPACITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_NULL_POINTER = 1,
  LC_STATUS_INVALID_ARGUMENT = 2,
  LC_STATUS_NUMERIC = 3,
  LC_STATUS_BUFFER_TOO_SMALL = 4,
  LC_STATUS_VALIDATION_FAILED = 5,
  LC_STATUS_PANIC = 6,
} LcStatus;

/**
 * Sweepable parameter.
 */
typedef enum LcParam {
  LC_PARAM_THETA = 0,
  LC_PARAM_CHI = 1,
  LC_PARAM_PHI = 2,
  LC_PARAM_GAMMA_T = 3,
  LC_PARAM_RHO11 = 4,
  LC_PARAM_RE_RHO12 = 5,
  LC_PARAM_IM_RHO12 = 6,
  LC_PARAM_ASYM = 7,
} LcParam;

/**
 * Opaque channel handle.
 */
typedef struct LcChannel LcChannel;

/**
 * Opaque sweep result handle.
 */
typedef struct LcSweep LcSweep;

typedef struct LcParams {
  double gamma13;
  double gamma23;
  double theta;
  double chi;
  double phi;
  double gamma_t;
} LcParams;

/**
 * Qubit input state `[[rho11, rho12], [rho12*, 1 − rho11]]`.
 */
typedef struct LcInputState {
  double rho11;
  double re_rho12;
  double im_rho12;
} LcInputState;

typedef struct LcDiagnostics {
  double max_trace_deviation;
  double max_hermiticity_deviation;
  double min_choi_eigenvalue;
  /**
   * 1 when all three checks pass, else 0.
   */
  int32_t passed;
} LcDiagnostics;

/**
 * Entropies in bits; spectra sorted in descending order.
 */
typedef struct LcInfo {
  double coherent_information;
  double output_entropy;
  double entropy_exchange;
  double output_spectrum[3];
  double joint_spectrum[6];
} LcInfo;

typedef struct LcAxis {
  /**
   * An `LcParam` value; kept as a plain integer so foreign callers
   * cannot hand over an out-of-range enum.
   */
  int32_t param;
  double start;
  double stop;
  size_t points;
} LcAxis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lc_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the untruncated length
 * including the terminator; 1 means no error is recorded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t lc_last_error_message(char *buf, size_t len);

/**
 * Symmetric system, θ = π, χ = π/2, φ = 0, γt = ∞.
 */
struct LcParams lc_params_default(void);

struct LcInputState lc_input_maximally_mixed(void);

/**
 * Builds the channel for `params` and stores a new handle in `*out`.
 *
 * # Safety
 * `params` must point to a valid `LcParams`; `out` to writable storage.
 */
enum LcStatus lc_channel_new(const struct LcParams *params, struct LcChannel **out);

/**
 * Releases a channel handle. Null is ignored.
 *
 * # Safety
 * `channel` must be null or a handle from `lc_channel_new` not yet freed.
 */
void lc_channel_free(struct LcChannel *channel);

/**
 * Copies transfer operator `ŝ_mn` (3×3, row-major, interleaved re/im:
 * 18 doubles) into `out`.
 *
 * # Safety
 * `channel` must be a live handle; `out` must point to `len` doubles.
 */
enum LcStatus lc_channel_operator(const struct LcChannel *channel,
                                  size_t m,
                                  size_t n,
                                  double *out,
                                  size_t len);

/**
 * Trace, Hermiticity and Choi-positivity diagnostics. Returns
 * `LC_STATUS_VALIDATION_FAILED` (with `*out` filled) when a check fails.
 *
 * # Safety
 * `channel` must be a live handle; `out` must be writable.
 */
enum LcStatus lc_channel_validate(const struct LcChannel *channel, struct LcDiagnostics *out);

/**
 * Full entropy report for `input` sent through `channel`.
 *
 * # Safety
 * All pointers must be valid; `channel` a live handle.
 */
enum LcStatus lc_channel_analyze(const struct LcChannel *channel,
                                 const struct LcInputState *input,
                                 struct LcInfo *out);

/**
 * Coherent information in bits.
 *
 * # Safety
 * All pointers must be valid; `channel` a live handle.
 */
enum LcStatus lc_channel_coherent_information(const struct LcChannel *channel,
                                              const struct LcInputState *input,
                                              double *out);

/**
 * Evaluates I_c over one or two axes. `threads` caps the worker count
 * (0 = automatic).
 *
 * # Safety
 * `params`, `input` must be valid; `axes` must point to `n_axes` entries;
 * `out` must be writable.
 */
enum LcStatus lc_sweep_run(const struct LcParams *params,
                           const struct LcInputState *input,
                           const struct LcAxis *axes,
                           size_t n_axes,
                           size_t threads,
                           struct LcSweep **out);

/**
 * Evaluates a figure preset (`"fig1a"`, `"fig1b"`, `"fig2a"`, `"fig2b"`)
 * with `points` samples per axis.
 *
 * # Safety
 * `figure` must be a NUL-terminated string; `out` must be writable.
 */
enum LcStatus lc_figure_run(const char *figure,
                            size_t points,
                            size_t threads,
                            struct LcSweep **out);

/**
 * Releases a sweep handle. Null is ignored.
 *
 * # Safety
 * `sweep` must be null or a live handle from `lc_sweep_run`/`lc_figure_run`.
 */
void lc_sweep_free(struct LcSweep *sweep);

/**
 * Number of axes (1 or 2); 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t lc_sweep_axis_count(const struct LcSweep *sweep);

/**
 * Number of grid values; 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t lc_sweep_len(const struct LcSweep *sweep);

/**
 * Copies the coordinates of axis `axis` into `out`.
 *
 * # Safety
 * `sweep` must be a live handle; `out` must point to `len` doubles.
 */
enum LcStatus lc_sweep_axis_values(const struct LcSweep *sweep,
                                   size_t axis,
                                   double *out,
                                   size_t len);

/**
 * Copies I_c values in grid order (last axis fastest) into `out`.
 *
 * # Safety
 * `sweep` must be a live handle; `out` must point to `len` doubles.
 */
enum LcStatus lc_sweep_values(const struct LcSweep *sweep, double *out, size_t len);

/**
 * Largest I_c and its flat grid index (first occurrence on ties).
 *
 * # Safety
 * `sweep` must be a live handle; `value` and `index` must be writable.
 */
enum LcStatus lc_sweep_max(const struct LcSweep *sweep, double *value, size_t *index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAMBDA_CAPACITY_H */
