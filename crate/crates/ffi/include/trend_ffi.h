#ifndef TREND_FFI_H
#define TREND_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. Values match the command-line exit codes where they
 * overlap.
 */
typedef enum TrendStatus {
  TREND_STATUS_OK = 0,
  TREND_STATUS_NULL_POINTER = 1,
  TREND_STATUS_VALIDATION = 2,
  TREND_STATUS_IO = 3,
  TREND_STATUS_NUMERICAL = 4,
  TREND_STATUS_PANIC = 5,
} TrendStatus;

typedef enum TrendFrequency {
  TREND_FREQUENCY_MONTHLY = 0,
  TREND_FREQUENCY_DAILY = 1,
} TrendFrequency;

typedef enum TrendModel {
  TREND_MODEL_LINEAR = 0,
  TREND_MODEL_CUBIC = 1,
  TREND_MODEL_TANH = 2,
} TrendModel;

/**
 * A per-period P&L series.
 */
typedef struct TrendPnl TrendPnl;

/**
 * A price series on a regular calendar.
 */
typedef struct TrendSeries TrendSeries;

/**
 * Signals computed from a [`TrendSeries`].
 */
typedef struct TrendSignals TrendSignals;

typedef struct TrendSharpe {
  double sharpe;
  double tstat;
  double n_years;
  size_t count;
} TrendSharpe;

typedef struct TrendDebiased {
  double beta;
  double correlation;
  double tstat_debiased;
} TrendDebiased;

/**
 * Fitted response curve. Parameters a model does not have are NaN.
 */
typedef struct TrendFit {
  enum TrendModel model;
  double a;
  double b;
  double b2;
  double b3;
  double s_star;
  double stderr_a;
  double stderr_b;
  double stderr_b2;
  double stderr_b3;
  double sse;
  size_t n_points;
  bool linear_limit;
} TrendFit;

typedef struct TrendStats {
  double sharpe;
  double tstat;
  double tstat_debiased;
  double beta;
  double correlation_long;
  double drift_sharpe;
  double drift_tstat;
  double n_years;
} TrendStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *trend_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *trend_version(void);

/**
 * Build a series of `len` consecutive periods starting at `start_yyyymmdd`.
 * NaN closes mark absent periods.
 *
 * # Safety
 * `closes` must point to `len` readable doubles; `out` must be writable.
 */
enum TrendStatus trend_series_new(const double *closes,
                                  size_t len,
                                  int32_t start_yyyymmdd,
                                  enum TrendFrequency frequency,
                                  struct TrendSeries **out);

/**
 * # Safety
 * `series` must be null or a handle from `trend_series_new`, not yet freed.
 */
void trend_series_free(struct TrendSeries *series);

/**
 * Number of periods, or 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t trend_series_len(const struct TrendSeries *series);

/**
 * Compute signals with EMA timescale `n` periods.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum TrendStatus trend_signals_compute(const struct TrendSeries *series,
                                       double n,
                                       struct TrendSignals **out);

/**
 * # Safety
 * `signals` must be null or a live handle.
 */
void trend_signals_free(struct TrendSignals *signals);

/**
 * # Safety
 * `signals` must be null or a live handle.
 */
size_t trend_signals_len(const struct TrendSignals *signals);

/**
 * Copy signal columns into caller buffers of length `len`. Any buffer may
 * be null to skip that column; `valid` receives 0 or 1.
 *
 * # Safety
 * Non-null buffers must have room for `len` elements.
 */
enum TrendStatus trend_signals_copy(const struct TrendSignals *signals,
                                    double *signal,
                                    double *ref_price,
                                    double *vol,
                                    uint8_t *valid,
                                    size_t len);

/**
 * Trend-following P&L: sign(signal) times the σ-normalized next change.
 *
 * # Safety
 * Both handles must be live and computed from the same series.
 */
enum TrendStatus trend_pnl_trend(const struct TrendSeries *series,
                                 const struct TrendSignals *signals,
                                 struct TrendPnl **out);

/**
 * Long-only P&L on the same risk scale.
 *
 * # Safety
 * As for `trend_pnl_trend`.
 */
enum TrendStatus trend_pnl_long(const struct TrendSeries *series,
                                const struct TrendSignals *signals,
                                struct TrendPnl **out);

/**
 * Sum of `count` P&L series over the union of their dates.
 *
 * # Safety
 * `items` must point to `count` live handles.
 */
enum TrendStatus trend_pnl_aggregate(const struct TrendPnl *const *items,
                                     size_t count,
                                     struct TrendPnl **out);

/**
 * # Safety
 * `pnl` must be null or a live handle.
 */
void trend_pnl_free(struct TrendPnl *pnl);

/**
 * # Safety
 * `pnl` must be null or a live handle.
 */
size_t trend_pnl_len(const struct TrendPnl *pnl);

/**
 * Copy dates, values and validity flags; any buffer may be null.
 *
 * # Safety
 * Non-null buffers must have room for `len` elements.
 */
enum TrendStatus trend_pnl_copy(const struct TrendPnl *pnl,
                                int32_t *dates,
                                double *values,
                                uint8_t *valid,
                                size_t len);

/**
 * # Safety
 * `pnl` must be a live handle; `out` must be writable.
 */
enum TrendStatus trend_pnl_sharpe(const struct TrendPnl *pnl, struct TrendSharpe *out);

/**
 * Remove the projection of `trend` on `long` and report what is left.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum TrendStatus trend_pnl_debias(const struct TrendPnl *trend,
                                  const struct TrendPnl *long_,
                                  struct TrendDebiased *out);

/**
 * Fit `model` to the points (s[i], d[i]).
 *
 * # Safety
 * `s` and `d` must each point to `len` readable doubles.
 */
enum TrendStatus trend_fit(const double *s,
                           const double *d,
                           size_t len,
                           enum TrendModel model,
                           struct TrendFit *out);

/**
 * Load a manifest, run every instrument with timescale `n`, and return the
 * aggregate trend P&L and its headline statistics. Either output may be
 * null.
 *
 * # Safety
 * `manifest_path` must be a NUL-terminated UTF-8 path.
 */
enum TrendStatus trend_backtest_manifest(const char *manifest_path,
                                         double n,
                                         struct TrendPnl **out_aggregate,
                                         struct TrendStats *out_stats);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREND_FFI_H */
