#ifndef SBPROJ_H
#define SBPROJ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SBP_STATUS_OK = 0,
  SBP_STATUS_NULL_POINTER = 1,
  SBP_STATUS_INVALID_PARAMETER = 2,
  /**
   * A bound was queried outside the range where it holds.
   */
  SBP_STATUS_OUT_OF_DOMAIN = 3,
  SBP_STATUS_DIMENSION_MISMATCH = 4,
  SBP_STATUS_NON_FINITE = 5,
  SBP_STATUS_PANIC = 6,
  SBP_STATUS_OTHER = 7,
} SbpStatus;

typedef enum {
  SBP_MODEL_BERNOULLI = 0,
  SBP_MODEL_FIXED = 1,
  SBP_MODEL_GAUSSIAN = 2,
  SBP_MODEL_ACHLIOPTAS = 3,
  SBP_MODEL_PING = 4,
  SBP_MODEL_BOURGAIN = 5,
} SbpModel;

/**
 * Opaque projector handle.
 */
typedef struct SbpProjector SbpProjector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sbp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sbp_version(void);

/**
 * Draws a projection matrix. `p` is read for Bernoulli only and `c` for
 * fixed and Bourgain only.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
SbpStatus sbp_projector_new(SbpModel model,
                            size_t d,
                            size_t m,
                            double p,
                            size_t c,
                            uint64_t seed,
                            SbpProjector **out);

/**
 * Releases a projector. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`sbp_projector_new`] and not be freed twice.
 */
void sbp_projector_free(SbpProjector *handle);

/**
 * # Safety
 * `handle` must be a live projector; `d` and `m` valid for one write each.
 */
SbpStatus sbp_projector_dims(const SbpProjector *handle, size_t *d, size_t *m);

/**
 * Projects one vector of length `d` into `out` of length `m`.
 *
 * # Safety
 * `x` valid for `x_len` reads, `out` for `out_len` writes.
 */
SbpStatus sbp_project(const SbpProjector *handle,
                      const double *x,
                      size_t x_len,
                      double *out,
                      size_t out_len);

/**
 * Projects `n` row-major vectors; `out` receives `n·m` values.
 *
 * # Safety
 * `x` valid for `n·d` reads, `out` for `out_len` writes.
 */
SbpStatus sbp_project_batch(const SbpProjector *handle,
                            const double *x,
                            size_t n,
                            double *out,
                            size_t out_len);

/**
 * Centering constant `q` of the fixed-sparsity model.
 *
 * # Safety
 * `out` valid for one write.
 */
SbpStatus sbp_fixed_q(size_t d, size_t c, double *out);

/**
 * Variance of `‖η‖²` under the centered Bernoulli model.
 *
 * # Safety
 * `x` valid for `len` reads, `out` for one write.
 */
SbpStatus sbp_var_bernoulli(const double *x, size_t len, size_t m, double p, double *out);

/**
 * Variance of `‖η‖²` under the centered fixed-sparsity model (`d = len`).
 *
 * # Safety
 * `x` valid for `len` reads, `out` for one write.
 */
SbpStatus sbp_var_fixed(const double *x, size_t len, size_t m, size_t c, double *out);

/**
 * # Safety
 * `x` valid for `len` reads, `out` for one write.
 */
SbpStatus sbp_var_gaussian(const double *x, size_t len, size_t m, double *out);

/**
 * # Safety
 * `out` valid for one write.
 */
SbpStatus sbp_min_m_bernoulli(uint64_t n, double eps, double p, uint64_t *out);

/**
 * # Safety
 * `out` valid for one write.
 */
SbpStatus sbp_min_m_fixed(uint64_t n, double eps, size_t d, size_t c, uint64_t *out);

/**
 * # Safety
 * `out` valid for one write.
 */
SbpStatus sbp_bernoulli_two_sided(double eps, size_t m, size_t d, double p, double *out);

/**
 * # Safety
 * `out` valid for one write.
 */
SbpStatus sbp_fixed_two_sided(double eps, size_t m, size_t d, size_t c, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBPROJ_H */
