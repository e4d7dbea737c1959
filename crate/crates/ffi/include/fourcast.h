#ifndef FOURCAST_H
#define FOURCAST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcModelKind {
  FC_MODEL_KIND_FSE = 0,
  FC_MODEL_KIND_FSET = 1,
  FC_MODEL_KIND_FSETF = 2,
} FcModelKind;

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_ARGUMENT = 2,
  FC_STATUS_IO = 3,
  FC_STATUS_PARSE = 4,
  FC_STATUS_SPEC_VIOLATION = 5,
  FC_STATUS_RANK_DEFICIENT = 6,
  FC_STATUS_INSUFFICIENT_HISTORY = 7,
  FC_STATUS_MISSING_DATA = 8,
  FC_STATUS_BUFFER_TOO_SMALL = 9,
  FC_STATUS_PANIC = 99,
} FcStatus;

typedef struct FcForecast FcForecast;

typedef struct FcModel FcModel;

typedef struct FcSeries FcSeries;

/**
 * Regressor configuration for daily data. The annual and weekly periods
 * are fixed at 364 and 7 days; temperature and lag columns follow the
 * model kind.
 */
typedef struct FcRegressorSpec {
  size_t annual_harmonics;
  size_t weekly_harmonics;
  size_t modulated_harmonics;
  bool include_trend;
  double comfort_temp;
} FcRegressorSpec;

typedef struct FcMetrics {
  double mape_percent;
  double rmse;
  double rmse_percent;
  size_t n;
} FcMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fc_version(void);

/**
 * Message of the last failed call on this thread, or an empty string.
 * Valid until the next fourcast call on the same thread.
 */
const char *fc_last_error_message(void);

/**
 * # Safety
 * `origin` must be a NUL-terminated string, `values` must point to `len`
 * doubles, and `out` must be writable.
 */
enum FcStatus fc_series_new(const char *origin,
                            const double *values,
                            size_t len,
                            struct FcSeries **out);

/**
 * Reads a `date,value` CSV and interpolates gaps of up to `max_gap` days.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum FcStatus fc_series_from_csv(const char *path, size_t max_gap, struct FcSeries **out);

/**
 * # Safety
 * `series` must be null or a live handle.
 */
size_t fc_series_len(const struct FcSeries *series);

/**
 * # Safety
 * `series` must be null or a handle not yet freed.
 */
void fc_series_free(struct FcSeries *series);

/**
 * Default daily configuration: 12 annual, 2 weekly and 5 modulated
 * harmonics, trend on, comfort temperature 18 °C.
 */
struct FcRegressorSpec fc_spec_default(void);

/**
 * # Safety
 * `spec` must be null or point to a valid struct.
 */
enum FcStatus fc_spec_validate(const struct FcRegressorSpec *spec);

/**
 * Fits `kind` on all samples before `train_end`. `temperature` may be
 * null for `FC_MODEL_KIND_FSE`.
 *
 * # Safety
 * Handles must be live, strings NUL-terminated, and `out` writable.
 */
enum FcStatus fc_model_fit(enum FcModelKind kind,
                           const struct FcSeries *demand,
                           const struct FcSeries *temperature,
                           const struct FcRegressorSpec *spec,
                           const char *train_end,
                           struct FcModel **out);

/**
 * # Safety
 * `model` must be a live handle and `path` NUL-terminated.
 */
enum FcStatus fc_model_save(const struct FcModel *model, const char *path);

/**
 * # Safety
 * `path` must be NUL-terminated and `out` writable.
 */
enum FcStatus fc_model_load(const char *path, struct FcModel **out);

/**
 * # Safety
 * `model` must be null or a live handle.
 */
size_t fc_model_coefficient_count(const struct FcModel *model);

/**
 * Copies the coefficients into `out`, which must hold at least
 * `fc_model_coefficient_count` doubles.
 *
 * # Safety
 * `model` must be a live handle and `out` must point to `cap` doubles.
 */
enum FcStatus fc_model_coefficients(const struct FcModel *model, double *out, size_t cap);

/**
 * Writes the NUL-terminated label of coefficient `index` into `buf`.
 *
 * # Safety
 * `model` must be a live handle and `buf` must point to `cap` bytes.
 */
enum FcStatus fc_model_coefficient_label(const struct FcModel *model,
                                         size_t index,
                                         char *buf,
                                         size_t cap);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void fc_model_free(struct FcModel *model);

/**
 * Multi-step forecast for FSE/FSET models. `temperature` may be null for FSE.
 *
 * # Safety
 * Handles must be live, strings NUL-terminated, and `out` writable.
 */
enum FcStatus fc_forecast_horizon(const struct FcModel *model,
                                  const char *from,
                                  const char *to,
                                  const struct FcSeries *temperature,
                                  struct FcForecast **out);

/**
 * Day-ahead forecast for an FSETF model using observed demand for the lag.
 *
 * # Safety
 * Handles must be live, strings NUL-terminated, and `out` writable.
 */
enum FcStatus fc_forecast_feedback(const struct FcModel *model,
                                   const char *from,
                                   const char *to,
                                   const struct FcSeries *temperature,
                                   const struct FcSeries *actual,
                                   struct FcForecast **out);

/**
 * # Safety
 * `forecast` must be null or a live handle.
 */
size_t fc_forecast_len(const struct FcForecast *forecast);

/**
 * # Safety
 * `forecast` must be a live handle and `out` must point to `cap` doubles.
 */
enum FcStatus fc_forecast_predictions(const struct FcForecast *forecast, double *out, size_t cap);

/**
 * Metrics against observed demand; `FC_STATUS_MISSING_DATA` when the
 * forecast has no attached actuals.
 *
 * # Safety
 * `forecast` must be a live handle and `out` writable.
 */
enum FcStatus fc_forecast_metrics(const struct FcForecast *forecast, struct FcMetrics *out);

/**
 * # Safety
 * `forecast` must be null or a handle not yet freed.
 */
void fc_forecast_free(struct FcForecast *forecast);

/**
 * Mean absolute percentage error, in percent.
 *
 * # Safety
 * `actual` and `forecast` must point to `n` doubles; `out` must be writable.
 */
enum FcStatus fc_mape(const double *actual, const double *forecast, size_t n, double *out);

/**
 * # Safety
 * `actual` and `forecast` must point to `n` doubles; `out` must be writable.
 */
enum FcStatus fc_rmse(const double *actual, const double *forecast, size_t n, double *out);

/**
 * RMSE as a percentage of the mean actual value.
 *
 * # Safety
 * `actual` and `forecast` must point to `n` doubles; `out` must be writable.
 */
enum FcStatus fc_rmse_percent(const double *actual, const double *forecast, size_t n, double *out);

/**
 * Heating degree-days `max(comfort − temperature, 0)`.
 */
double fc_temperature_deviation(double temperature, double comfort);

/**
 * `100·(wd_mean/h_mean − 1)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_ratio_holiday(double wd_mean, double h_mean, double *out);

/**
 * `100·(wd_mean/we_mean − 1)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_ratio_weekend(double wd_mean, double we_mean, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOURCAST_H */
