#ifndef BOOJUM_H
#define BOOJUM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum {
  BOOJUM_STATUS_OK = 0,
  BOOJUM_STATUS_NULL_POINTER = 1,
  BOOJUM_STATUS_INVALID_ARGUMENT = 2,
  BOOJUM_STATUS_IMPROPER = 3,
  BOOJUM_STATUS_UNSUPPORTED = 4,
  BOOJUM_STATUS_RESOLUTION = 5,
  BOOJUM_STATUS_PANIC = 6,
} BoojumStatus;

typedef enum {
  BOOJUM_REASON_PROPER = 0,
  BOOJUM_REASON_RATE_NONPOSITIVE = 1,
  BOOJUM_REASON_SHAPE_AT_OR_BELOW_MINUS_ONE = 2,
  BOOJUM_REASON_BOUNDARY_T_AT_LEAST_ONE = 3,
} BoojumReason;

/**
 * Opaque parameter handle.
 */
typedef struct BoojumParams BoojumParams;

/**
 * Estimator settings. `rho <= 0` selects the automatic pivot.
 */
typedef struct {
  size_t grid_n;
  size_t samples_p;
  double rho;
  uint64_t seed;
} BoojumEstimatorConfig;

typedef struct {
  bool proper;
  BoojumReason reason;
  /**
   * Whether `t_value` is meaningful (only when `m > 0` and all rates are positive).
   */
  bool has_t_value;
  double t_value;
} BoojumVerdict;

typedef struct {
  double log_z;
  double std_err;
  /**
   * The pivot actually used.
   */
  double rho;
} BoojumEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or NULL. The
 * pointer stays valid until the next call into this library on the thread.
 */
const char *boojum_last_error(void);

/**
 * Default estimator settings (grid 500, 2000 samples, automatic pivot, seed 0).
 */
BoojumEstimatorConfig boojum_estimator_config_default(void);

/**
 * Creates a parameter handle from `m` and `k` rates.
 *
 * # Safety
 * `r` must point to `k` readable doubles and `out` must be writable.
 */
BoojumStatus boojum_params_new(double m, const double *r, size_t k, BoojumParams **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not have been freed.
 */
void boojum_params_free(BoojumParams *p);

/**
 * Number of coordinates, or 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
size_t boojum_params_dim(const BoojumParams *p);

/**
 * Shape parameter `m`, or NaN for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
double boojum_params_m(const BoojumParams *p);

/**
 * Copies the rates into `out` (holding `len >= dim` doubles).
 *
 * # Safety
 * `p` must be a live handle and `out` must hold `len` doubles.
 */
BoojumStatus boojum_params_rates(const BoojumParams *p, double *out, size_t len);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
BoojumStatus boojum_classify(const BoojumParams *p, BoojumVerdict *out);

/**
 * `1 - T` when `m > 0`; `*has_margin` is false otherwise.
 *
 * # Safety
 * `p` must be a live handle; `margin` and `has_margin` writable.
 */
BoojumStatus boojum_boundary_margin(const BoojumParams *p, double *margin, bool *has_margin);

/**
 * Estimates `log Z`. Improper parameters give `BOOJUM_IMPROPER` unless
 * `allow_improper` is set.
 *
 * # Safety
 * `p` must be a live handle, `cfg` readable and `out` writable.
 */
BoojumStatus boojum_estimate_log_z(const BoojumParams *p,
                                   const BoojumEstimatorConfig *cfg,
                                   bool allow_improper,
                                   BoojumEstimate *out);

/**
 * Conjugate update with `n_obs` observations stored row-major in `ys`
 * (`n_obs * dim` doubles). Writes a new handle to `out`.
 *
 * # Safety
 * `prior` must be a live handle, `ys` must hold `n_obs * dim` doubles and
 * `out` must be writable.
 */
BoojumStatus boojum_posterior(const BoojumParams *prior,
                              const double *ys,
                              size_t n_obs,
                              BoojumParams **out);

/**
 * Writes `E[x]` into `out` (holding `len >= dim` doubles).
 *
 * # Safety
 * `p` must be a live handle, `cfg` readable and `out` must hold `len` doubles.
 */
BoojumStatus boojum_mean(const BoojumParams *p,
                         const BoojumEstimatorConfig *cfg,
                         double *out,
                         size_t len);

/**
 * Mixed moment `E[Π x_k^{order_k}]` for total order at most 2.
 *
 * # Safety
 * `p` must be a live handle, `order` must hold `dim` entries, `cfg`
 * readable and `out` writable.
 */
BoojumStatus boojum_moment(const BoojumParams *p,
                           const uint32_t *order,
                           const BoojumEstimatorConfig *cfg,
                           double *out);

/**
 * # Safety
 * `out` must be writable.
 */
BoojumStatus boojum_log_gamma(double x, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
BoojumStatus boojum_digamma(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOOJUM_H */
