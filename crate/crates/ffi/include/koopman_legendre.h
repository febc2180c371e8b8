#ifndef KOOPMAN_LEGENDRE_H
#define KOOPMAN_LEGENDRE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_NULL_POINTER = 1,
  KL_STATUS_INVALID_UTF8 = 2,
  KL_STATUS_CONFIG = 3,
  KL_STATUS_INVALID_ARGUMENT = 4,
  KL_STATUS_BUFFER_TOO_SMALL = 5,
  KL_STATUS_NEAR_DEFECTIVE = 6,
  KL_STATUS_NON_FINITE = 7,
  KL_STATUS_OVERFLOW = 8,
  KL_STATUS_PANIC = 9,
} KlStatus;

/**
 * A decomposed Koopman model bound to its system's domain.
 */
typedef struct KlModel KlModel;

/**
 * A parsed and validated system configuration.
 */
typedef struct KlSystem KlSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a JSON system configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum KlStatus kl_system_from_json(const char *json, struct KlSystem **out);

/**
 * # Safety
 * `system` must come from [`kl_system_from_json`] and not be used afterwards.
 */
void kl_system_free(struct KlSystem *system);

/**
 * Number of state variables, or 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t kl_system_dim(const struct KlSystem *system);

/**
 * Build the Koopman model at `order`. Pass a negative order to use the
 * configured one.
 *
 * # Safety
 * `system` must be a live handle and `out` a valid pointer.
 */
enum KlStatus kl_model_build(const struct KlSystem *system, int32_t order, struct KlModel **out);

/**
 * # Safety
 * `model` must come from [`kl_model_build`] and not be used afterwards.
 */
void kl_model_free(struct KlModel *model);

/**
 * Basis size `n`, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t kl_model_basis_size(const struct KlModel *model);

/**
 * Number of observables, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t kl_model_observable_count(const struct KlModel *model);

/**
 * Copy the sorted eigenvalues into `re` and `im`, each of length `len >= n`.
 *
 * # Safety
 * `re` and `im` must point to `len` writable doubles.
 */
enum KlStatus kl_model_eigenvalues(const struct KlModel *model, double *re, double *im, size_t len);

/**
 * Copy `K` row-major into `out`, which holds `len >= n*n` doubles.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum KlStatus kl_model_koopman_matrix(const struct KlModel *model, double *out, size_t len);

/**
 * Evaluate the observables from state `x0` (original coordinates, length
 * `dim`) at `num_times` increasing times. Results go to `out` as
 * `out[t * observable_count + g]`. `max_imag` may be null.
 *
 * # Safety
 * Pointers must reference buffers of the stated lengths.
 */
enum KlStatus kl_model_propagate(const struct KlModel *model,
                                 const double *x0,
                                 size_t dim,
                                 const double *times,
                                 size_t num_times,
                                 double *out,
                                 size_t out_len,
                                 double *max_imag);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *kl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOOPMAN_LEGENDRE_H */
