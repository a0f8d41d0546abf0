#ifndef TVDLAB_H
#define TVDLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TvdlabStatus {
  TVDLAB_STATUS_OK = 0,
  TVDLAB_STATUS_NULL_POINTER = 1,
  TVDLAB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The dual solve stopped at `max_iter`; the result handle is still set.
   */
  TVDLAB_STATUS_NOT_CONVERGED = 3,
  TVDLAB_STATUS_IO = 4,
  TVDLAB_STATUS_NON_FINITE = 5,
  TVDLAB_STATUS_PANIC = 6,
} TvdlabStatus;

/**
 * Opaque dual TV result.
 */
typedef struct TvdlabDualResult TvdlabDualResult;

/**
 * Opaque cell-average field.
 */
typedef struct TvdlabField TvdlabField;

/**
 * Dual solver parameters. Fill with `tvdlab_dual_params_default`.
 */
typedef struct TvdlabDualParams {
  double mu;
  double gamma;
  double epsilon;
  double feas_tol;
  uint64_t max_iter;
} TvdlabDualParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t tvdlab_last_error(char *buf, size_t len);

/**
 * Builds a field from `n * n` cell averages in row-major `(i, j)` order,
 * `i` along x.
 *
 * # Safety
 * `values` must be valid for `len` reads; `out` must be writable.
 */
enum TvdlabStatus tvdlab_field_new(size_t n,
                                   double xmin,
                                   double xmax,
                                   double ymin,
                                   double ymax,
                                   const double *values,
                                   size_t len,
                                   struct TvdlabField **out);

/**
 * Projects a named shape (`gaussian`, `square_pulse`, ...) onto cell
 * averages.
 *
 * # Safety
 * `shape` must be a NUL-terminated string; `out` must be writable.
 */
enum TvdlabStatus tvdlab_field_project(const char *shape,
                                       size_t n,
                                       double xmin,
                                       double xmax,
                                       double ymin,
                                       double ymax,
                                       struct TvdlabField **out);

/**
 * Reads a field file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TvdlabStatus tvdlab_field_read(const char *path, struct TvdlabField **out);

/**
 * Cells per side, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t tvdlab_field_n(const struct TvdlabField *field);

/**
 * Copies the `n * n` values into `buf`.
 *
 * # Safety
 * `field` must be a live handle and `buf` valid for `len` writes.
 */
enum TvdlabStatus tvdlab_field_values(const struct TvdlabField *field, double *buf, size_t len);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void tvdlab_field_free(struct TvdlabField *field);

/**
 * Anisotropic TV.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum TvdlabStatus tvdlab_tv_aniso(const struct TvdlabField *field, double *out);

/**
 * Isotropic TV.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum TvdlabStatus tvdlab_tv_iso(const struct TvdlabField *field, double *out);

/**
 * Default parameters for an `n x n` grid.
 *
 * # Safety
 * `out` must be writable.
 */
enum TvdlabStatus tvdlab_dual_params_default(size_t n, struct TvdlabDualParams *out);

/**
 * Dual TV. `params` may be null for the grid defaults. Returns
 * `NotConverged` with `*out` set when the iteration cap was hit.
 *
 * # Safety
 * `field` must be a live handle, `params` null or readable, `out` writable.
 */
enum TvdlabStatus tvdlab_tv_dual(const struct TvdlabField *field,
                                 const struct TvdlabDualParams *params,
                                 struct TvdlabDualResult **out);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
double tvdlab_dual_value(const struct TvdlabDualResult *r);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
uint64_t tvdlab_dual_iterations(const struct TvdlabDualResult *r);

/**
 * `max |F v - D U|` at exit.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double tvdlab_dual_residual(const struct TvdlabDualResult *r);

/**
 * 1 if converged, else 0.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
int32_t tvdlab_dual_converged(const struct TvdlabDualResult *r);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void tvdlab_dual_free(struct TvdlabDualResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TVDLAB_H */
