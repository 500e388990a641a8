#ifndef VOTUM_H
#define VOTUM_H

/* Generated by cbindgen from votum-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Metric averaging mode.
typedef enum VotumAveraging {
  VOTUM_AVERAGING_WEIGHTED = 0,
  VOTUM_AVERAGING_MACRO = 1,
} VotumAveraging;

// Status of a votum call; mirrors the CLI exit codes.
typedef enum VotumStatus {
  VOTUM_STATUS_OK = 0,
  VOTUM_STATUS_USAGE_ERROR = 1,
  VOTUM_STATUS_DATA_ERROR = 2,
  VOTUM_STATUS_INTERNAL_ERROR = 3,
} VotumStatus;

// Classification task of a trained model.
typedef enum VotumTask {
  VOTUM_TASK_BINARY = 0,
  VOTUM_TASK_MULTI_CLASS = 1,
} VotumTask;

// How member outputs are combined.
typedef enum VotumVoting {
  VOTUM_VOTING_HARD = 0,
  VOTUM_VOTING_SOFT = 1,
} VotumVoting;

// Opaque handle to a loaded dataset.
typedef struct VotumDataset VotumDataset;

// Opaque handle to a trained model or ensemble.
typedef struct VotumModel VotumModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *votum_version(void);

// Message of the last failure on this thread; valid until the next
// failing call on the same thread. Do not free.
const char *votum_last_error(void);

// Free a string returned through a `char **` out-parameter.
//
// # Safety
// `s` must be null or a pointer previously returned by this library
// and not yet freed.
void votum_string_free(char *s);

// Load a CSV file with default column conventions (binary label
// `label`, type column `type`).
//
// # Safety
// `path` must be a valid NUL-terminated string; `out` must be a valid
// pointer.
enum VotumStatus votum_dataset_read_csv(const char *path, struct VotumDataset **out);

// Run the preprocessing pipeline (encode, impute, scale) and return a
// new dataset handle.
//
// # Safety
// `input` must be a live dataset handle; `out` must be valid.
enum VotumStatus votum_dataset_prepare(const struct VotumDataset *input, struct VotumDataset **out);

// Number of rows; 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live dataset handle.
uintptr_t votum_dataset_rows(const struct VotumDataset *dataset);

// Number of columns; 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live dataset handle.
uintptr_t votum_dataset_cols(const struct VotumDataset *dataset);

// Per-attack-type row counts as a JSON object string; free the result
// with `votum_string_free`.
//
// # Safety
// `dataset` must be a live dataset handle; `out_json` must be valid.
enum VotumStatus votum_dataset_stats_json(const struct VotumDataset *dataset, char **out_json);

// Free a dataset handle.
//
// # Safety
// `dataset` must be null or a live handle, freed exactly once.
void votum_dataset_free(struct VotumDataset *dataset);

// Train a model on a prepared dataset. `model_spec` is a single kind
// (`cart`, `rf`, `knn`, `nb`) or a preset (`dt-rf-knn-nb`, `dt-rf-nb`,
// `dt-rf-knn`).
//
// # Safety
// `train` must be a live dataset handle, `model_spec` a valid string,
// `out` a valid pointer.
enum VotumStatus votum_train(const struct VotumDataset *train,
                             const char *model_spec,
                             enum VotumTask task,
                             enum VotumVoting voting,
                             uint64_t seed,
                             struct VotumModel **out);

// Save a model (container file plus one file per member).
//
// # Safety
// `model` must be a live model handle, `path` a valid string.
enum VotumStatus votum_model_save(const struct VotumModel *model, const char *path);

// Load a model saved by `votum_model_save` or the CLI.
//
// # Safety
// `path` must be a valid string, `out` a valid pointer.
enum VotumStatus votum_model_load(const char *path, struct VotumModel **out);

// Score a model on a labeled prepared dataset. `out_metrics` receives
// accuracy, precision, recall, F-measure in that order.
//
// # Safety
// `model` and `data` must be live handles; `out_metrics` must point to
// at least 4 doubles.
enum VotumStatus votum_model_evaluate(const struct VotumModel *model,
                                      const struct VotumDataset *data,
                                      enum VotumAveraging averaging,
                                      double *out_metrics);

// Write the input rows plus a `predicted` column to `out_path` as CSV.
//
// # Safety
// `model` and `data` must be live handles; `out_path` a valid string.
enum VotumStatus votum_model_predict_csv(const struct VotumModel *model,
                                         const struct VotumDataset *data,
                                         const char *out_path);

// Analytic ensemble error: probability that at least `k` of `n`
// independent members with per-member error `epsilon` are wrong
// together. `k < 0` selects the majority threshold floor(n/2)+1.
//
// # Safety
// `out` must be a valid pointer.
enum VotumStatus votum_ensemble_error(uint32_t n, double epsilon, int32_t k, double *out);

// Free a model handle.
//
// # Safety
// `model` must be null or a live handle, freed exactly once.
void votum_model_free(struct VotumModel *model);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* VOTUM_H */
