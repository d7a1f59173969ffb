#ifndef CANARD_H
#define CANARD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CanardReliefKind {
  CANARD_RELIEF_KIND_VDP = 0,
  CANARD_RELIEF_KIND_BRUSSELATOR = 1,
  CANARD_RELIEF_KIND_QUADRATIC = 2,
} CanardReliefKind;

typedef enum CanardStatus {
  CANARD_STATUS_OK = 0,
  CANARD_STATUS_NULL_POINTER = 1,
  CANARD_STATUS_INVALID_ARGUMENT = 2,
  CANARD_STATUS_COMPUTATION_FAILED = 3,
  CANARD_STATUS_BUFFER_TOO_SMALL = 4,
  CANARD_STATUS_PANIC = 5,
} CanardStatus;

/**
 * A relief R(x) = ℜ(e^{−iθ}F(x)).
 */
typedef struct CanardRelief CanardRelief;

/**
 * Exact Van der Pol coefficients a_0..a_n and functions v_0..v_n.
 */
typedef struct CanardVdpSeries CanardVdpSeries;

typedef struct CanardComplex {
  double re;
  double im;
} CanardComplex;

typedef struct CanardShootResult {
  struct CanardComplex parameter;
  /**
   * Scaled observable 2ℑ(p)·e^{k/ε}·ε^m for the chosen system.
   */
  double observable;
  double residual;
  uint32_t iterations;
  uint32_t precision_digits;
} CanardShootResult;

typedef struct CanardStokesDiff {
  double x;
  struct CanardComplex diff;
  double formula;
  double ratio;
  uint32_t digits;
} CanardStokesDiff;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *canard_version(void);

/**
 * Size in bytes (including the NUL) of the last error message on this thread.
 */
size_t canard_last_error_length(void);

/**
 * Copies the last error message on this thread into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum CanardStatus canard_last_error_message(char *buf, size_t len);

/**
 * Computes a_0..a_n exactly. Release the handle with `canard_vdp_series_free`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CanardStatus canard_vdp_series_new(size_t n, struct CanardVdpSeries **out);

/**
 * # Safety
 * `series` must come from `canard_vdp_series_new` and not be used afterwards.
 */
void canard_vdp_series_free(struct CanardVdpSeries *series);

/**
 * Highest index n held by the series.
 *
 * # Safety
 * `series` must be a live handle; `n` a valid pointer.
 */
enum CanardStatus canard_vdp_series_order(const struct CanardVdpSeries *series, size_t *n);

/**
 * a_k as a "num/den" string. Pass `buf = NULL, len = 0` to query the size
 * through `needed`.
 *
 * # Safety
 * `series` must be a live handle; `buf` must point to `len` writable bytes.
 */
enum CanardStatus canard_vdp_series_coefficient(const struct CanardVdpSeries *series,
                                                size_t k,
                                                char *buf,
                                                size_t len,
                                                size_t *needed);

/**
 * b_n = a_n (4e/(3n))ⁿ in double precision.
 *
 * # Safety
 * `series` must be a live handle; `value` a valid pointer.
 */
enum CanardStatus canard_vdp_series_bn(const struct CanardVdpSeries *series,
                                       size_t n,
                                       double *value);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CanardStatus canard_relief_new(enum CanardReliefKind kind,
                                    double theta,
                                    struct CanardRelief **out);

/**
 * # Safety
 * `relief` must come from `canard_relief_new` and not be used afterwards.
 */
void canard_relief_free(struct CanardRelief *relief);

/**
 * # Safety
 * `relief` must be a live handle; `value` a valid pointer.
 */
enum CanardStatus canard_relief_value(const struct CanardRelief *relief,
                                      struct CanardComplex x,
                                      double *value);

/**
 * Sampled descent constant of the polyline through `points`.
 *
 * # Safety
 * `relief` must be a live handle; `points` must hold `n` elements; the
 * output pointers must be valid.
 */
enum CanardStatus canard_relief_descent_check(const struct CanardRelief *relief,
                                              const struct CanardComplex *points,
                                              size_t n,
                                              double *constant,
                                              bool *descending);

/**
 * Integrates a named field along the polyline and stores y at its end.
 * `field` is one of the CLI field names; `param` is α, a or λ.
 *
 * # Safety
 * `field` must be a NUL-terminated string; `points` must hold `n` elements;
 * `end` must be valid.
 */
enum CanardStatus canard_integrate(const char *field,
                                   struct CanardComplex eps,
                                   struct CanardComplex param,
                                   const struct CanardComplex *points,
                                   size_t n,
                                   struct CanardComplex y0,
                                   double tol,
                                   uint32_t precision_digits,
                                   struct CanardComplex *end);

/**
 * Canard value α⁺(ε) of the Van der Pol equation. `digits = 0` picks the
 * precision automatically.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum CanardStatus canard_shoot_vdp(double eps, uint32_t digits, struct CanardShootResult *result);

/**
 * Canard value a⁺(ε) of the Brusselator.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum CanardStatus canard_shoot_brusselator(double eps,
                                           uint32_t digits,
                                           struct CanardShootResult *result);

/**
 * Y₀⁺ − Y₀⁻ of the Van der Pol inner equation at real X.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum CanardStatus canard_vdp_stokes_diff(double x,
                                         uint32_t digits,
                                         struct CanardStokesDiff *result);

/**
 * Y₀⁺ − Y₀⁻ of the Brusselator inner equation at real X.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum CanardStatus canard_brusselator_stokes_diff(double x,
                                                 uint32_t digits,
                                                 struct CanardStokesDiff *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANARD_H */
