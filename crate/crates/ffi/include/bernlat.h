#ifndef BERNLAT_H
#define BERNLAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_ARGUMENT = 2,
  BL_STATUS_PARSE_ERROR = 3,
  BL_STATUS_BOUNDARY_NOT_INTEGER = 4,
  BL_STATUS_STRUCTURAL_VIOLATION = 5,
  BL_STATUS_BUFFER_TOO_SMALL = 6,
  BL_STATUS_INTERNAL = 7,
} BlStatus;

/**
 * Integer Bernstein coefficients `q_0..q_n` with their cutoff and shift.
 */
typedef struct BlApproximant BlApproximant;

/**
 * A certified function on [0, 1] with its modulus of continuity.
 */
typedef struct BlFunction BlFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *bl_last_error_message(void);

/**
 * Parses `text` as a function of `x` and certifies integer endpoint values
 * within `boundary_tol` (pass a negative value for the default 1e-9).
 * The modulus defaults to an empirical estimate.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum BlStatus bl_function_from_expr(const char *text, double boundary_tol, struct BlFunction **out);

/**
 * # Safety
 * `f` must be null or a handle from [`bl_function_from_expr`] not yet freed.
 */
void bl_function_free(struct BlFunction *f);

/**
 * Sets `omega(d) = min(constant * d, cap)`; pass a NaN cap for none.
 *
 * # Safety
 * `f` must be a live function handle.
 */
enum BlStatus bl_function_set_lipschitz(struct BlFunction *f, double constant, double cap);

/**
 * Sets `omega(d) = constant * d^exponent`.
 *
 * # Safety
 * `f` must be a live function handle.
 */
enum BlStatus bl_function_set_hoelder(struct BlFunction *f, double constant, double exponent);

/**
 * # Safety
 * `f` must be a live function handle and `out` valid for writes.
 */
enum BlStatus bl_function_eval(const struct BlFunction *f, double x, double *out);

/**
 * Integer endpoint values `f(0)` and `f(1)`.
 *
 * # Safety
 * `f` must be a live function handle; outputs valid for writes.
 */
enum BlStatus bl_function_endpoints(const struct BlFunction *f, int64_t *f0, int64_t *f1);

/**
 * Builds `Q_n`. A negative `t` selects the default cutoff.
 *
 * # Safety
 * `f` must be a live function handle; `out` valid for writes.
 */
enum BlStatus bl_approximate(const struct BlFunction *f,
                             size_t n,
                             int64_t t,
                             struct BlApproximant **out);

/**
 * # Safety
 * `a` must be null or a handle from [`bl_approximate`] not yet freed.
 */
void bl_approximant_free(struct BlApproximant *a);

/**
 * Degree `n`, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a live approximant handle.
 */
size_t bl_approximant_degree(const struct BlApproximant *a);

/**
 * # Safety
 * `a` must be null or a live approximant handle.
 */
size_t bl_approximant_cutoff(const struct BlApproximant *a);

/**
 * The shift `epsilon_n`; NaN for a null handle.
 *
 * # Safety
 * `a` must be null or a live approximant handle.
 */
double bl_approximant_epsilon(const struct BlApproximant *a);

/**
 * Copies `q_0..q_n` into `buf`. `*written` receives `n + 1` in all cases, so
 * a call with `len = 0` queries the required size.
 *
 * # Safety
 * `buf` must be valid for `len` writes (may be null when `len` is 0).
 */
enum BlStatus bl_approximant_coefficients(const struct BlApproximant *a,
                                          int64_t *buf,
                                          size_t len,
                                          size_t *written);

/**
 * # Safety
 * `a` must be a live approximant handle; `out` valid for writes.
 */
enum BlStatus bl_approximant_eval(const struct BlApproximant *a, double x, double *out);

/**
 * Grid sup-norm error of `a` against `f` on `m` uniform points; `m = 0`
 * selects `max(2049, 8n + 1)`.
 *
 * # Safety
 * Handles must be live; `out` valid for writes.
 */
enum BlStatus bl_sup_error(const struct BlFunction *f,
                           const struct BlApproximant *a,
                           size_t m,
                           double *out);

/**
 * `rho(f, n)` and its smallest minimizing cutoff.
 *
 * # Safety
 * `f` must be a live function handle; outputs valid for writes.
 */
enum BlStatus bl_rho(const struct BlFunction *f, size_t n, double *value, size_t *t);

/**
 * Cutoff for degree `n`: the default rule when `alpha <= 0`, otherwise the
 * rule tuned to a Hoelder exponent `alpha`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_choose_t(size_t n, double alpha, size_t *out);

/**
 * `p_{n,k}(x)`, zero for `k` outside `0..=n`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_eval_basis(size_t n, int64_t k, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BERNLAT_H */
