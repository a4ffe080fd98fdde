#ifndef CTTM_H
#define CTTM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CttmStatus {
  CTTM_STATUS_OK = 0,
  CTTM_STATUS_NULL_POINTER = 1,
  CTTM_STATUS_INVALID_INPUT = 2,
  CTTM_STATUS_INVALID_CONFIG = 3,
  CTTM_STATUS_NUMERIC_DOMAIN = 4,
  CTTM_STATUS_FOLD_LEAKAGE = 5,
  CTTM_STATUS_FORMAT_VERSION = 6,
  CTTM_STATUS_IO = 7,
  CTTM_STATUS_PARSE = 8,
  CTTM_STATUS_PANIC = 9,
} CttmStatus;

/**
 * Fitted turn-taking model.
 */
typedef struct CttmModel CttmModel;

/**
 * Spiking network with its trained weights.
 */
typedef struct CttmNetwork CttmNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of every file format this library reads and writes.
 */
uint32_t cttm_format_version(void);

/**
 * Copy the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes). Returns the full message
 * length excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point at `len` writable bytes.
 */
size_t cttm_last_error_message(char *buf, size_t len);

/**
 * F1 of the positive class; 0 when precision and recall are both zero.
 */
double cttm_f1_score(uint64_t true_pos, uint64_t false_pos, uint64_t false_neg);

/**
 * Cohen's kappa of two 0/1 label arrays of length `n`.
 *
 * # Safety
 * `a` and `b` must point at `n` bytes; `kappa` must be writable.
 */
enum CttmStatus cttm_cohen_kappa(const uint8_t *a, const uint8_t *b, size_t n, double *kappa);

/**
 * DTW distance with L1 local cost between row-major `la x m` and
 * `lb x m` sequences.
 *
 * # Safety
 * `a` and `b` must point at `la * m` and `lb * m` doubles; `dist` must be
 * writable.
 */
enum CttmStatus cttm_dtw_distance(const double *a,
                                  size_t la,
                                  const double *b,
                                  size_t lb,
                                  size_t m,
                                  double *dist);

/**
 * Build the default 250-neuron network for `seed`.
 *
 * # Safety
 * `net` must be writable; the handle stored there is owned by the caller.
 */
enum CttmStatus cttm_network_new(uint64_t seed, struct CttmNetwork **net);

/**
 * Load a network from a weights file.
 *
 * # Safety
 * `file` must be a NUL-terminated path; `net` must be writable.
 */
enum CttmStatus cttm_network_load(const char *file, struct CttmNetwork **net);

/**
 * # Safety
 * `net` must be null or a handle from this library not yet freed.
 */
void cttm_network_free(struct CttmNetwork *net);

/**
 * Number of neurons, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t cttm_network_n_neurons(const struct CttmNetwork *net);

/**
 * Simulate `t_total` ms with the 20 mA stimulation pairs
 * `(stim_ms[i], stim_neuron[i])`. `raster` receives `n_neurons * t_total`
 * bytes, row-major by neuron: 1 where the neuron fired.
 *
 * # Safety
 * Arrays must hold `n_stim` elements; `raster` must hold
 * `n_neurons * t_total` writable bytes.
 */
enum CttmStatus cttm_network_simulate(const struct CttmNetwork *net,
                                      const uint32_t *stim_ms,
                                      const uint32_t *stim_neuron,
                                      size_t n_stim,
                                      uint32_t t_total,
                                      uint8_t *raster);

/**
 * Load a model written by `cttm train`.
 *
 * # Safety
 * `file` must be a NUL-terminated path; `model` must be writable.
 */
enum CttmStatus cttm_model_load(const char *file, struct CttmModel **model);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void cttm_model_free(struct CttmModel *model);

/**
 * Raw sensor channels the model expects, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t cttm_model_input_channels(const struct CttmModel *model);

/**
 * Classify a row-major `rows x cols` observation. `label` receives 1 for
 * turn-giving and 0 for turn-keeping; `decision` (may be null) the SVM
 * decision value.
 *
 * # Safety
 * `samples` must hold `rows * cols` doubles; `label` must be writable;
 * `decision` must be null or writable.
 */
enum CttmStatus cttm_model_predict(const struct CttmModel *model,
                                   const double *samples,
                                   size_t rows,
                                   size_t cols,
                                   uint8_t *label,
                                   double *decision);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTTM_H */
