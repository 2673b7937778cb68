#ifndef DEPHASING_H
#define DEPHASING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Value of the `env` argument of [`dph_model_new`].
 */
typedef enum DphEnv {
  DPH_ENV_INDEPENDENT = 0,
  DPH_ENV_COMMON = 1,
} DphEnv;

/**
 * Kind of threshold crossing reported by the timescale calls.
 */
typedef enum DphOutcome {
  DPH_OUTCOME_FINITE = 0,
  DPH_OUTCOME_ASYMPTOTIC = 1,
  DPH_OUTCOME_NEVER = 2,
} DphOutcome;

/**
 * Result code of every call. `DPH_STATUS_OK` is zero.
 */
typedef enum DphStatus {
  DPH_STATUS_OK = 0,
  DPH_STATUS_NULL_POINTER = 1,
  DPH_STATUS_INVALID_ARGUMENT = 2,
  DPH_STATUS_DOMAIN = 3,
  DPH_STATUS_NOT_ENTANGLED = 4,
  DPH_STATUS_NO_CONVERGENCE = 5,
  DPH_STATUS_UNSUPPORTED = 6,
  DPH_STATUS_NOT_POSITIVE_DEFINITE = 7,
  DPH_STATUS_PANIC = 8,
} DphStatus;

/**
 * Opaque model handle.
 */
typedef struct DphModel DphModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model. `process` uses the `ou:gamma=G`, `fgn:h=H`, `wiener`,
 * `white` grammar; `env` is a [`DphEnv`] value.
 *
 * # Safety
 * `process` must be a NUL-terminated string and `out` a valid pointer. The
 * handle written to `out` must be released with [`dph_model_free`].
 */
enum DphStatus dph_model_new(const char *process,
                             uint32_t env,
                             double lambda,
                             double omega0,
                             struct DphModel **out);

/**
 * Releases a model. Passing NULL is a no-op.
 *
 * # Safety
 * `model` must come from [`dph_model_new`] and not have been freed.
 */
void dph_model_free(struct DphModel *model);

/**
 * Static description of a status code. Never NULL.
 */
const char *dph_status_message(enum DphStatus status);

/**
 * Principal branch of the Lambert W function.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DphStatus dph_lambert_w0(double z, double *out);

/**
 * Dephasing integral `beta(t)` of the model's process.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum DphStatus dph_beta(const struct DphModel *model, double t, double *out);

/**
 * Coherence damping factor at time `t`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum DphStatus dph_dephasing_factor(const struct DphModel *model, double t, double *out);

/**
 * Negativity of mixture `c` at time `t`.
 *
 * # Safety
 * `model` and `out` must be valid; `c` must point to 4 doubles.
 */
enum DphStatus dph_negativity_at(const struct DphModel *model,
                                 const double *c,
                                 double t,
                                 double *out);

/**
 * Noise-averaged density matrix of mixture `c` at time `t`.
 *
 * # Safety
 * `model` must be valid; `c` must point to 4 doubles; `out_re` and
 * `out_im` must each point to 16 writable doubles.
 */
enum DphStatus dph_evolve(const struct DphModel *model,
                          const double *c,
                          double t,
                          double *out_re,
                          double *out_im);

/**
 * Monte Carlo estimate of the state at time `t` from `samples` noise
 * realizations. The result depends only on the arguments, not on threading.
 *
 * # Safety
 * As for [`dph_evolve`].
 */
enum DphStatus dph_mc_evolve(const struct DphModel *model,
                             const double *c,
                             double t,
                             size_t samples,
                             size_t grid_density,
                             uint64_t seed,
                             double *out_re,
                             double *out_im);

/**
 * Entanglement-preserving time for threshold ratio `r`. `out_t` receives
 * infinity when the outcome is not finite.
 *
 * # Safety
 * `model`, `out_t` and `out_kind` must be valid; `c` must point to 4 doubles.
 */
enum DphStatus dph_preserving_time(const struct DphModel *model,
                                   const double *c,
                                   double r,
                                   double *out_t,
                                   enum DphOutcome *out_kind);

/**
 * Entanglement-survival time. `out_t` receives infinity when the outcome
 * is not finite.
 *
 * # Safety
 * As for [`dph_preserving_time`].
 */
enum DphStatus dph_survival_time(const struct DphModel *model,
                                 const double *c,
                                 double *out_t,
                                 enum DphOutcome *out_kind);

/**
 * Lower bound on the preserving time for initial negativity `n0`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum DphStatus dph_tstar_lower_bound(const struct DphModel *model,
                                     double n0,
                                     double r,
                                     double *out);

/**
 * Lower bound on the survival time for initial negativity `n0 < 1`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum DphStatus dph_tes_lower_bound(const struct DphModel *model, double n0, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEPHASING_H */
