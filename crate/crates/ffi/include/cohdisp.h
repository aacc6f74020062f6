#ifndef COHDISP_H
#define COHDISP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CohdispStatus {
  COHDISP_STATUS_OK = 0,
  COHDISP_STATUS_NULL_POINTER = 1,
  COHDISP_STATUS_INVALID_ARGUMENT = 2,
  COHDISP_STATUS_INVALID_STATE = 3,
  COHDISP_STATUS_NUMERICAL = 4,
  COHDISP_STATUS_FLAT_OBJECTIVE = 5,
  COHDISP_STATUS_CONFIG = 6,
  COHDISP_STATUS_IO = 7,
  COHDISP_STATUS_PANIC = 8,
} CohdispStatus;

typedef enum CohdispModel {
  COHDISP_MODEL_PLAIN = 0,
  COHDISP_MODEL_BUFFERED = 1,
} CohdispModel;

/**
 * Opaque density matrix.
 */
typedef struct CohdispDensityMatrix CohdispDensityMatrix;

typedef struct CohdispStats {
  size_t dim;
  double mean_population;
  double predictability_sq;
  double c1;
  double c2;
  double purity;
  double dispersion;
  /**
   * In nats.
   */
  double rel_entropy_coherence;
} CohdispStats;

typedef struct CohdispOptimalRank {
  size_t dim;
  double s_continuous;
  size_t rank;
  double dispersion;
} CohdispOptimalRank;

/**
 * `sign * exp(ln_magnitude)`; `sign == 0` means exactly zero.
 */
typedef struct CohdispLogValue {
  int8_t sign;
  double ln_magnitude;
} CohdispLogValue;

typedef struct CohdispThermalParams {
  size_t d;
  double epsilon_ev;
  double lambda;
  uint64_t n;
  /**
   * 0 means equal to `n`.
   */
  uint64_t total_n;
} CohdispThermalParams;

typedef struct CohdispTauStar {
  double tau_star;
  double log10_dispersion;
  double kelvin;
  double celsius;
} CohdispTauStar;

typedef struct CohdispWindow {
  double tau_star_min;
  double tau_star_max;
  double kelvin_min;
  double kelvin_max;
  double celsius_min;
  double celsius_max;
} CohdispWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cohdisp_last_error_message(void);

/**
 * Builds a density matrix from `2 * dim * dim` doubles, row-major
 * interleaved `re, im`.
 *
 * # Safety
 * `re_im` must point to `2 * dim * dim` readable doubles and `out` to a
 * writable handle pointer.
 */
enum CohdispStatus cohdisp_density_new(size_t dim,
                                       const double *re_im,
                                       bool check_psd,
                                       struct CohdispDensityMatrix **out);

/**
 * # Safety
 * `handle` must be null or come from this library and not be freed twice.
 */
void cohdisp_density_free(struct CohdispDensityMatrix *handle);

/**
 * # Safety
 * `handle` must be a live handle and `out` writable.
 */
enum CohdispStatus cohdisp_density_dim(const struct CohdispDensityMatrix *handle, size_t *out);

/**
 * # Safety
 * `handle` must be a live handle and `out` writable.
 */
enum CohdispStatus cohdisp_density_stats(const struct CohdispDensityMatrix *handle,
                                         struct CohdispStats *out);

/**
 * `n`-fold tensor power as a new handle.
 *
 * # Safety
 * `handle` must be a live handle and `out` writable.
 */
enum CohdispStatus cohdisp_density_kron_power(const struct CohdispDensityMatrix *handle,
                                              uint32_t n,
                                              struct CohdispDensityMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CohdispStatus cohdisp_dispersion_at_rank(size_t dim, size_t rank, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CohdispStatus cohdisp_optimal_rank(size_t dim, struct CohdispOptimalRank *out);

/**
 * Dispersion of `n` copies of a state with the given single-copy purity,
 * squared predictability and l1 coherence.
 *
 * # Safety
 * `out` must be writable.
 */
enum CohdispStatus cohdisp_ncopy_dispersion(size_t dim,
                                            double purity,
                                            double predictability_sq,
                                            double c1,
                                            uint64_t n,
                                            struct CohdispLogValue *out);

/**
 * # Safety
 * `params` must be readable and `out` writable.
 */
enum CohdispStatus cohdisp_find_tau_star(const struct CohdispThermalParams *params,
                                         enum CohdispModel model,
                                         struct CohdispTauStar *out);

/**
 * Window of maximizing temperatures for the sweep in a TOML config file.
 *
 * # Safety
 * `config_path` must be a NUL-terminated UTF-8 path and `out` writable.
 */
enum CohdispStatus cohdisp_window_report(const char *config_path, struct CohdispWindow *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHDISP_H */
