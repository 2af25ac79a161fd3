#ifndef NONMARKOV_H
#define NONMARKOV_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NmStatus {
  NM_STATUS_OK = 0,
  NM_STATUS_NULL_POINTER = 1,
  NM_STATUS_INVALID_ARGUMENT = 2,
  NM_STATUS_DIMENSION = 3,
  NM_STATUS_INVALID_STATE = 4,
  NM_STATUS_NUMERICAL = 5,
  NM_STATUS_PARSE = 6,
  NM_STATUS_IO = 7,
  NM_STATUS_PANIC = 8,
} NmStatus;

/**
 * Opaque dataset handle.
 */
typedef struct NmDataset NmDataset;

/**
 * Opaque polynomial model handle.
 */
typedef struct NmModel NmModel;

/**
 * Dataset generation parameters. A zero count means "exact" for
 * `samples_per_pmf` and `shots`; `n_pairs == 0` selects the ten standard
 * `(q, R)` pairs.
 */
typedef struct NmPlanParams {
  const double *q;
  const double *r;
  size_t n_pairs;
  size_t pmfs_per_pair;
  size_t samples_per_pmf;
  uint64_t shots;
  double noise_eps;
  uint64_t seed;
  double log_base;
  /**
   * 0 measures X, Y, Z; 1 measures I, X, Y.
   */
  uint32_t measurements;
} NmPlanParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a
 * success. Valid until the next call into this library on the same thread.
 */
const char *nm_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *nm_version(void);

/**
 * `p(i,j) = p(i)[q δ_ij + (1-q) p(j)]`, written row-major into `out[16]`.
 *
 * # Safety
 * `marginal` must point to 4 doubles and `out` to 16 writable doubles.
 */
enum NmStatus nm_joint_pmf(const double *marginal, double q, double *out);

/**
 * Non-Markovianity of the process built from the prepared qubit state and a
 * joint Pauli pmf (`pmf[4*i + j]`), in units of `log_base` (2 for bits).
 *
 * # Safety
 * `pmf` must point to 16 doubles and `out` to a writable double.
 */
enum NmStatus nm_non_markovianity(const double *pmf, double log_base, double *out);

/**
 * Fills `out` with the standard plan: 10 pairs × 100 pmfs, 50 samples,
 * 5000 shots, no white noise, seed 0, bits, XYZ.
 *
 * # Safety
 * `out` must be writable.
 */
enum NmStatus nm_plan_params_default(struct NmPlanParams *out);

/**
 * # Safety
 * `params` must be valid; `out` must be writable. The pair arrays are read
 * only during the call.
 */
enum NmStatus nm_dataset_generate(const struct NmPlanParams *params, struct NmDataset **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum NmStatus nm_dataset_read_csv(const char *path, struct NmDataset **out);

/**
 * # Safety
 * `ds` must be a live handle and `path` a NUL-terminated string.
 */
enum NmStatus nm_dataset_write_csv(const struct NmDataset *ds, const char *path);

/**
 * Row count; 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live handle.
 */
size_t nm_dataset_len(const struct NmDataset *ds);

/**
 * Features per row; 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live handle.
 */
size_t nm_dataset_feature_count(const struct NmDataset *ds);

/**
 * Copies row `index`'s features into `features[0..cap]` and its label into
 * `label`. `cap` must be at least the feature count.
 *
 * # Safety
 * `ds` must be a live handle; `features` must hold `cap` doubles; `label`
 * must be writable.
 */
enum NmStatus nm_dataset_row(const struct NmDataset *ds,
                             size_t index,
                             double *features,
                             size_t cap,
                             double *label);

/**
 * # Safety
 * `ds` must be null or a handle not yet freed.
 */
void nm_dataset_free(struct NmDataset *ds);

/**
 * Least-squares polynomial fit over every row of `ds`.
 *
 * # Safety
 * `ds` must be a live handle; `out` must be writable.
 */
enum NmStatus nm_model_fit(const struct NmDataset *ds,
                           size_t degree,
                           double ridge,
                           struct NmModel **out);

/**
 * # Safety
 * `m` must be a live handle; `x` must hold `n` doubles; `out` writable.
 */
enum NmStatus nm_model_predict(const struct NmModel *m, const double *x, size_t n, double *out);

/**
 * # Safety
 * `m` must be a live handle and `path` a NUL-terminated string.
 */
enum NmStatus nm_model_save(const struct NmModel *m, const char *path);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum NmStatus nm_model_load(const char *path, struct NmModel **out);

/**
 * Number of model inputs; 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t nm_model_input_count(const struct NmModel *m);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void nm_model_free(struct NmModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONMARKOV_H */
