#ifndef TFROTOR_H
#define TFROTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Averaging group for [`tfr_psi_eps`].
 */
typedef enum TfrGroup {
  TFR_GROUP_ROTATION = 0,
  TFR_GROUP_TORUS = 1,
} TfrGroup;

/*
 M^p characterization used by [`tfr_mp_norm`].
 */
typedef enum TfrMethod {
  TFR_METHOD_STFT = 0,
  TFR_METHOD_ROTATION = 1,
  TFR_METHOD_ROTATION_FREQ = 2,
  TFR_METHOD_TORUS = 3,
  TFR_METHOD_TORUS_FREQ = 4,
  TFR_METHOD_SUP_ROTATION = 5,
  TFR_METHOD_SUP_ROTATION_FREQ = 6,
  TFR_METHOD_SUP_TORUS = 7,
  TFR_METHOD_SUP_TORUS_FREQ = 8,
} TfrMethod;

/*
 Estimator for [`tfr_psi_eps`]. `Auto` picks the exact route when one exists.
 */
typedef enum TfrPsiMode {
  TFR_PSI_MODE_AUTO = 0,
  TFR_PSI_MODE_MONTE_CARLO = 1,
  TFR_PSI_MODE_CLOSED_FORM = 2,
  TFR_PSI_MODE_QUADRATURE = 3,
} TfrPsiMode;

/*
 Status codes returned by every fallible function.
 */
typedef enum TfrStatus {
  TFR_STATUS_OK = 0,
  TFR_STATUS_NULL_POINTER = 1,
  TFR_STATUS_INVALID_ARGUMENT = 2,
  TFR_STATUS_INVALID_GRID = 3,
  TFR_STATUS_INVALID_SIGNAL = 4,
  TFR_STATUS_NUMERICAL_FAILURE = 5,
  TFR_STATUS_PANIC = 6,
} TfrStatus;

/*
 Opaque sampling grid.
 */
typedef struct TfrGrid TfrGrid;

/*
 Opaque sampled signal.
 */
typedef struct TfrSignal TfrSignal;

/*
 Result of a norm or Ψ_ε evaluation.
 */
typedef struct TfrEstimate {
  double value;
  double std_error;
} TfrEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *tfr_last_error(void);

/*
 Grid with `n` axes, `size` points per axis and side length `side`.

 # Safety
 `out` must be a valid pointer.
 */
enum TfrStatus tfr_grid_new(size_t n, size_t size, double side, struct TfrGrid **out_grid);

/*
 Default self-dual grid for dimension `n` (1 or 2).

 # Safety
 `out_grid` must be a valid pointer.
 */
enum TfrStatus tfr_grid_default(size_t n, struct TfrGrid **out_grid);

/*
 # Safety
 `grid` must come from this library and not be freed twice. NULL is ignored.
 */
void tfr_grid_free(struct TfrGrid *grid);

/*
 Number of samples of a signal on this grid (N^n), 0 for NULL.

 # Safety
 `grid` must be NULL or a live handle.
 */
size_t tfr_grid_len(const struct TfrGrid *grid);

/*
 Sample a named test signal such as `"hermite(1)"` or `"chirped-gaussian(0.5)"`.

 # Safety
 `grid` must be a live handle, `spec` a NUL-terminated string, `out_signal` valid.
 */
enum TfrStatus tfr_signal_generate(const struct TfrGrid *grid,
                                   const char *spec,
                                   struct TfrSignal **out_signal);

/*
 Signal from `len` = N^n samples given as separate real and imaginary arrays, row-major.

 # Safety
 `re` and `im` must point to `len` doubles.
 */
enum TfrStatus tfr_signal_from_values(const struct TfrGrid *grid,
                                      const double *re,
                                      const double *im,
                                      size_t len,
                                      struct TfrSignal **out_signal);

/*
 # Safety
 `signal` must come from this library and not be freed twice. NULL is ignored.
 */
void tfr_signal_free(struct TfrSignal *signal);

/*
 Number of samples, 0 for NULL.

 # Safety
 `signal` must be NULL or a live handle.
 */
size_t tfr_signal_len(const struct TfrSignal *signal);

/*
 Copy samples into caller buffers of length `len`, which must equal [`tfr_signal_len`].

 # Safety
 `re` and `im` must be writable for `len` doubles.
 */
enum TfrStatus tfr_signal_copy_values(const struct TfrSignal *signal,
                                      double *re,
                                      double *im,
                                      size_t len);

/*
 L² norm of a signal, NaN for NULL.

 # Safety
 `signal` must be NULL or a live handle.
 */
double tfr_signal_l2_norm(const struct TfrSignal *signal);

/*
 Partial fractional Fourier transform with one angle per axis (`count` = n).

 # Safety
 `thetas` must point to `count` doubles.
 */
enum TfrStatus tfr_frft(const struct TfrSignal *signal,
                        const double *thetas,
                        size_t count,
                        struct TfrSignal **out_signal);

/*
 p-th power of the M^p norm (or the sup for p = ∞ / sup methods).
 `seed` and `samples` only matter for rotation methods; `samples` = 0 picks the default.

 # Safety
 `out_estimate` must be valid.
 */
enum TfrStatus tfr_mp_norm(const struct TfrSignal *signal,
                           enum TfrMethod method,
                           double p,
                           uint64_t seed,
                           size_t samples,
                           struct TfrEstimate *out_estimate);

/*
 Ψ_ε at the phase-space point `z` (length 2n, ordered x then ξ).

 # Safety
 `z` must point to `len` doubles and `out_estimate` must be valid.
 */
enum TfrStatus tfr_psi_eps(const double *z,
                           size_t len,
                           double eps,
                           enum TfrGroup group,
                           enum TfrPsiMode mode,
                           uint64_t seed,
                           size_t samples,
                           struct TfrEstimate *out_estimate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFROTOR_H */
