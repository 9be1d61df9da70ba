#ifndef TRIPGEN_H
#define TRIPGEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TgStatus {
  TgOk = 0,
  /**
   * Bad argument: null pointer, zero rows, malformed input.
   */
  TgInvalidArgument = 1,
  /**
   * File could not be read or written.
   */
  TgIo = 2,
  /**
   * Model document failed validation.
   */
  TgCorrupt = 3,
  /**
   * Numeric failure (non-finite values, undefined percentage error).
   */
  TgNumeric = 4,
} TgStatus;

/**
 * Opaque handle to a loaded model.
 */
typedef struct TgModel TgModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *tg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tg_version(void);

/**
 * Loads a model document from `path` into `out`. The handle must be
 * released with `tg_model_free`.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer to writable storage for one handle.
 */
enum TgStatus tg_model_load(const char *path, struct TgModel **out);

/**
 * Releases a handle obtained from `tg_model_load`. A null handle is a no-op.
 *
 * # Safety
 * `model` must be null or a handle returned by `tg_model_load` that has not
 * already been freed.
 */
void tg_model_free(struct TgModel *model);

/**
 * Number of feature columns the model expects per row.
 *
 * # Safety
 * `model` must be a live handle from `tg_model_load`.
 */
uintptr_t tg_model_feature_count(const struct TgModel *model);

/**
 * Name of the model's response variable as a static string.
 *
 * # Safety
 * `model` must be a live handle from `tg_model_load`.
 */
const char *tg_model_target_name(const struct TgModel *model);

/**
 * Predicts trips for `n_rows` rows of unscaled features (row-major,
 * `n_rows * feature_count` doubles); the model's stored scaler is applied
 * internally. Writes `n_rows` predictions to `out`.
 *
 * # Safety
 * `model` must be a live handle; `features` must point to
 * `n_rows * tg_model_feature_count(model)` readable doubles; `out` must
 * point to `n_rows` writable doubles.
 */
enum TgStatus tg_model_predict(const struct TgModel *model,
                               const double *features,
                               uintptr_t n_rows,
                               double *out);

/**
 * Mean absolute percentage error over `n` (actual, forecast) pairs.
 * With `exclude_zero_actuals` false a zero actual is an error; with it
 * true such pairs are skipped. Writes the percentage to `out_mape`.
 *
 * # Safety
 * `actual` and `forecast` must each point to `n` readable doubles;
 * `out_mape` must be writable.
 */
enum TgStatus tg_mape(const double *actual,
                      const double *forecast,
                      uintptr_t n,
                      bool exclude_zero_actuals,
                      double *out_mape);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIPGEN_H */
