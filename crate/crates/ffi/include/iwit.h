#ifndef IWIT_H
#define IWIT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  IWIT_STATUS_OK = 0,
  IWIT_STATUS_NULL_POINTER = 1,
  IWIT_STATUS_INVALID_ARGUMENT = 2,
  IWIT_STATUS_PARSE_ERROR = 3,
  IWIT_STATUS_VALIDATION_ERROR = 4,
  IWIT_STATUS_NO_CONVERGENCE = 5,
  IWIT_STATUS_PANIC = 6,
} IwitStatus;

typedef enum {
  IWIT_VERDICT_COMPATIBLE = 0,
  IWIT_VERDICT_INCOMPATIBLE = 1,
  IWIT_VERDICT_UNDETERMINED = 2,
} IwitVerdict;

typedef enum {
  IWIT_REGION_COMPATIBLE = 0,
  IWIT_REGION_BOUNDARY = 1,
  IWIT_REGION_INCOMPATIBLE = 2,
} IwitRegion;

/**
 * Opaque partitioned state ensemble.
 */
typedef struct IwitEnsemble IwitEnsemble;

/**
 * Opaque measurement pair.
 */
typedef struct IwitPair IwitPair;

/**
 * Opaque incompatibility witness.
 */
typedef struct IwitWitness IwitWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *iwit_last_error_message(void);

/**
 * Copies the last error message into `buf` (always nul-terminated when
 * `len > 0`) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null with `len == 0`.
 */
size_t iwit_last_error_copy(char *buf, size_t len);

/**
 * Library version as a static nul-terminated string.
 */
const char *iwit_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void iwit_string_free(char *s);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
IwitStatus iwit_pair_from_json(const char *json, IwitPair **out);

/**
 * Noisy Fourier-MUB pair with smearings `gamma_phi`, `gamma_psi`.
 *
 * # Safety
 * `out` must be writable.
 */
IwitStatus iwit_pair_noisy_mub(size_t dim, double gamma_phi, double gamma_psi, IwitPair **out);

/**
 * # Safety
 * `pair` must be a live handle; `out` must be writable.
 */
IwitStatus iwit_pair_to_json(const IwitPair *pair, char **out);

/**
 * # Safety
 * `pair` must come from this library or be null.
 */
void iwit_pair_free(IwitPair *pair);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
IwitStatus iwit_ensemble_from_json(const char *json, IwitEnsemble **out);

/**
 * Fourier-MUB ensemble with noise parameters `mu_phi`, `mu_psi`.
 *
 * # Safety
 * `out` must be writable.
 */
IwitStatus iwit_ensemble_mub(size_t dim, double mu_phi, double mu_psi, IwitEnsemble **out);

/**
 * # Safety
 * `ens` must be a live handle; `out` must be writable.
 */
IwitStatus iwit_ensemble_to_json(const IwitEnsemble *ens, char **out);

/**
 * # Safety
 * `ens` must come from this library or be null.
 */
void iwit_ensemble_free(IwitEnsemble *ens);

/**
 * Optimal guessing probability with the block announced before measuring.
 *
 * # Safety
 * `ens` must be a live handle; `out` must be writable.
 */
IwitStatus iwit_p_prior(const IwitEnsemble *ens, double *out);

/**
 * Optimal guessing probability with the block announced after measuring.
 *
 * # Safety
 * `ens` must be a live handle; `out` must be writable.
 */
IwitStatus iwit_p_post(const IwitEnsemble *ens, double *out);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
IwitStatus iwit_witness_from_json(const char *json, IwitWitness **out);

/**
 * Witness of `ens`; `delta` is used instead of `P_post` when `override_delta` is nonzero.
 *
 * # Safety
 * `ens` must be a live handle; `out` must be writable.
 */
IwitStatus iwit_witness_from_ensemble(const IwitEnsemble *ens,
                                      int override_delta,
                                      double delta,
                                      IwitWitness **out);

/**
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
IwitStatus iwit_witness_eval(const IwitWitness *w, const IwitPair *pair, double *out);

/**
 * # Safety
 * `w` must be a live handle; `out` must be writable.
 */
IwitStatus iwit_witness_to_json(const IwitWitness *w, char **out);

/**
 * # Safety
 * `w` must come from this library or be null.
 */
void iwit_witness_free(IwitWitness *w);

/**
 * Numerical joint-measurability decision. `residual` may be null.
 *
 * # Safety
 * `pair` must be a live handle; `verdict` must be writable.
 */
IwitStatus iwit_joint_feasibility(const IwitPair *pair,
                                  double tol,
                                  size_t max_iter,
                                  IwitVerdict *verdict,
                                  double *residual);

/**
 * Closed-form `P_prior` of the Fourier-MUB ensemble.
 *
 * # Safety
 * `out` must be writable.
 */
IwitStatus iwit_mub_p_prior(size_t dim, double mu_phi, double mu_psi, double *out);

/**
 * Closed-form `P_post` of the Fourier-MUB ensemble.
 *
 * # Safety
 * `out` must be writable.
 */
IwitStatus iwit_mub_p_post(size_t dim, double mu_phi, double mu_psi, double *out);

/**
 * Point of the compatibility boundary at angle `theta`.
 *
 * # Safety
 * Both outputs must be writable.
 */
IwitStatus iwit_boundary_curve(size_t dim, double theta, double *gamma_phi, double *gamma_psi);

/**
 * Closed-form membership of the noisy MUB pair `(gamma_phi, gamma_psi)`.
 *
 * # Safety
 * `out` must be writable.
 */
IwitStatus iwit_region(size_t dim, double gamma_phi, double gamma_psi, IwitRegion *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IWIT_H */
