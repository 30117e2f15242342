#ifndef BOPERT_H
#define BOPERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BopertStatus {
  BOPERT_STATUS_OK = 0,
  BOPERT_STATUS_NULL_POINTER,
  BOPERT_STATUS_INVALID_ARGUMENT,
  BOPERT_STATUS_BUFFER_TOO_SMALL,
  BOPERT_STATUS_SAMPLE_COUNT_TOO_SMALL,
  BOPERT_STATUS_REALNESS_VIOLATION,
  BOPERT_STATUS_KAPPA_OUT_OF_RANGE,
  BOPERT_STATUS_NONPOSITIVE_DEPTH,
  BOPERT_STATUS_ASYMMETRIC_SYMBOL,
  BOPERT_STATUS_MEAN_RESIDUAL,
  BOPERT_STATUS_BLOWUP_DETECTED,
  BOPERT_STATUS_NOT_POSITIVE_DEFINITE,
  BOPERT_STATUS_THRESHOLD_NOT_FOUND,
  BOPERT_STATUS_QUADRATURE_NOT_CONVERGED,
  BOPERT_STATUS_COUNT_EXCEEDS_DIM,
  BOPERT_STATUS_FORMAT,
  BOPERT_STATUS_CONFIG,
  BOPERT_STATUS_IO,
  BOPERT_STATUS_PANIC,
} BopertStatus;

/**
 * Real field on the torus, Fourier modes `0..=N`.
 */
typedef struct BopertField BopertField;

/**
 * Fourier multiplier symbol.
 */
typedef struct BopertSymbol BopertSymbol;

/**
 * Sampled solution of an evolution.
 */
typedef struct BopertTrajectory BopertTrajectory;

/**
 * Solver settings; start from [`bopert_solver_params_default`].
 */
typedef struct BopertSolverParams {
  size_t modes;
  double dt;
  double horizon;
  double dealias_fraction;
  size_t sample_every;
  bool nonlinear;
} BopertSolverParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bopert_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next `bopert_*` call on the same thread.
 */
const char *bopert_last_error(void);

/**
 * Builds a field from coefficients `re[n] + i im[n]`, `n = 0..len`, with `len >= 2`.
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles; `out` must be writable.
 */
enum BopertStatus bopert_field_new(const double *re,
                                   const double *im,
                                   size_t len,
                                   struct BopertField **out);

/**
 * Analyzes `len` uniform samples on `[0, 2π)` into modes `0..=modes`.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` must be writable.
 */
enum BopertStatus bopert_field_from_samples(const double *samples,
                                            size_t len,
                                            size_t modes,
                                            struct BopertField **out);

/**
 * `2cos x + 0.5 sin 2x` on `modes >= 2` modes.
 *
 * # Safety
 * `out` must be writable.
 */
enum BopertStatus bopert_field_standard(size_t modes, struct BopertField **out);

/**
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void bopert_field_free(struct BopertField *field);

/**
 * Highest retained mode `N`, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t bopert_field_modes(const struct BopertField *field);

/**
 * Copies coefficients `0..=N` into `re`/`im`, each of capacity `len >= N + 1`.
 *
 * # Safety
 * `field` must be live; `re` and `im` must point to `len` writable doubles.
 */
enum BopertStatus bopert_field_coeffs(const struct BopertField *field,
                                      double *re,
                                      double *im,
                                      size_t len);

/**
 * Samples the field on `points >= 2N + 1` uniform points into `out`.
 *
 * # Safety
 * `field` must be live; `out` must point to `len >= points` writable doubles.
 */
enum BopertStatus bopert_field_synthesize(const struct BopertField *field,
                                          size_t points,
                                          double *out,
                                          size_t len);

/**
 * `(Σ |f̂(n)|² (|n| + κ)^{2r})^{1/2}`.
 *
 * # Safety
 * `field` must be live; `out` must be writable.
 */
enum BopertStatus bopert_field_sobolev_norm(const struct BopertField *field,
                                            double r,
                                            double kappa,
                                            double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum BopertStatus bopert_symbol_zero(struct BopertSymbol **out);

/**
 * Constant symbol `a(n) = gamma`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BopertStatus bopert_symbol_rayleigh(double gamma, struct BopertSymbol **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum BopertStatus bopert_symbol_ilw_full(double delta, struct BopertSymbol **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum BopertStatus bopert_symbol_ilw_boosted(double delta, struct BopertSymbol **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum BopertStatus bopert_symbol_smith(struct BopertSymbol **out);

/**
 * # Safety
 * `symbol` must be live; `re` and `im` must be writable.
 */
enum BopertStatus bopert_symbol_eval(const struct BopertSymbol *symbol,
                                     int64_t n,
                                     double *re,
                                     double *im);

/**
 * # Safety
 * `symbol` must be null or a handle not yet freed.
 */
void bopert_symbol_free(struct BopertSymbol *symbol);

/**
 * Defaults for `modes`: dt 1e-3, horizon 1, 2/3 dealiasing, every step sampled.
 */
struct BopertSolverParams bopert_solver_params_default(size_t modes);

/**
 * Integrates `u_t = H u_xx - 2 u u_x + A u` from `u0`.
 *
 * # Safety
 * `u0`, `symbol` and `params` must be live; `out` must be writable.
 */
enum BopertStatus bopert_evolve(const struct BopertField *u0,
                                const struct BopertSymbol *symbol,
                                const struct BopertSolverParams *params,
                                struct BopertTrajectory **out);

/**
 * Number of stored samples, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t bopert_trajectory_len(const struct BopertTrajectory *traj);

/**
 * # Safety
 * `traj` must be live; `out` must be writable.
 */
enum BopertStatus bopert_trajectory_time(const struct BopertTrajectory *traj,
                                         size_t index,
                                         double *out);

/**
 * Copies sample `index` into a new field handle owned by the caller.
 *
 * # Safety
 * `traj` must be live; `out` must be writable.
 */
enum BopertStatus bopert_trajectory_state(const struct BopertTrajectory *traj,
                                          size_t index,
                                          struct BopertField **out);

/**
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void bopert_trajectory_free(struct BopertTrajectory *traj);

/**
 * `β(κ; u)` with Lax truncation `dim`.
 *
 * # Safety
 * `u` must be live; `out` must be writable.
 */
enum BopertStatus bopert_beta(const struct BopertField *u, double kappa, size_t dim, double *out);

/**
 * `β_s(κ; u)` for `-1/2 < s < 0`.
 *
 * # Safety
 * `u` must be live; `out` must be writable.
 */
enum BopertStatus bopert_beta_s(const struct BopertField *u,
                                double s,
                                double kappa,
                                size_t dim,
                                double *out);

/**
 * Derivative of `β(κ; ·)` at `u` in direction `f`.
 *
 * # Safety
 * `u` and `f` must be live; `out` must be writable.
 */
enum BopertStatus bopert_dbeta(const struct BopertField *u,
                               double kappa,
                               const struct BopertField *f,
                               size_t dim,
                               double *out);

/**
 * Smallest `κ` in `1, 2, 4, ...` with `L_u + κ > 1/2`.
 *
 * # Safety
 * `u` must be live; `out` must be writable.
 */
enum BopertStatus bopert_kappa_threshold(const struct BopertField *u,
                                         double s,
                                         size_t dim,
                                         double *out);

/**
 * Writes `γ_n = λ_n - λ_{n-1} - 1`, `n = 1..=count`, of the zero-mean Lax matrix.
 *
 * # Safety
 * `u` must be live; `out` must point to `len >= count` writable doubles.
 */
enum BopertStatus bopert_eigen_gaps(const struct BopertField *u,
                                    size_t dim,
                                    size_t count,
                                    double *out,
                                    size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOPERT_H */
