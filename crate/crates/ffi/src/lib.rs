//! C ABI over `trend-core`.
//!
//! Every fallible function returns a [`TrendStatus`]; on failure the message
//! is available from [`trend_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Dates cross the
//! boundary as `yyyymmdd` integers, missing prices as NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chrono::{Datelike, NaiveDate};
use trend_core::backtest::{
    aggregate, debias, instrument_pnl, longonly_pnl, run_pool, sharpe_and_tstat, stats_report, PnlSeries,
};
use trend_core::error::{EXIT_IO, EXIT_NUMERICAL};
use trend_core::fit::{fit_cubic, fit_linear, fit_tanh, FitResult, Normalization, ScatterSet};
use trend_core::ingest::{load_manifest, load_pool};
use trend_core::series::{calendar, Frequency, Period, PriceSeries};
use trend_core::signal::{compute_signal, SignalSeries, TrendConfig};

/// Outcome of a call. Values match the command-line exit codes where they
/// overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Io = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendFrequency {
    Monthly = 0,
    Daily = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendModel {
    Linear = 0,
    Cubic = 1,
    Tanh = 2,
}

/// A price series on a regular calendar.
pub struct TrendSeries(PriceSeries);

/// Signals computed from a [`TrendSeries`].
pub struct TrendSignals(SignalSeries);

/// A per-period P&L series.
pub struct TrendPnl(PnlSeries);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TrendSharpe {
    pub sharpe: f64,
    pub tstat: f64,
    pub n_years: f64,
    pub count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TrendDebiased {
    pub beta: f64,
    pub correlation: f64,
    pub tstat_debiased: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TrendStats {
    pub sharpe: f64,
    pub tstat: f64,
    pub tstat_debiased: f64,
    pub beta: f64,
    pub correlation_long: f64,
    pub drift_sharpe: f64,
    pub drift_tstat: f64,
    pub n_years: f64,
}

/// Fitted response curve. Parameters a model does not have are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TrendFit {
    pub model: TrendModel,
    pub a: f64,
    pub b: f64,
    pub b2: f64,
    pub b3: f64,
    pub s_star: f64,
    pub stderr_a: f64,
    pub stderr_b: f64,
    pub stderr_b2: f64,
    pub stderr_b3: f64,
    pub sse: f64,
    pub n_points: usize,
    pub linear_limit: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(TrendStatus, String);

impl From<trend_core::Error> for Failure {
    fn from(e: trend_core::Error) -> Self {
        let status = match e.exit_code() {
            EXIT_IO => TrendStatus::Io,
            EXIT_NUMERICAL => TrendStatus::Numerical,
            _ => TrendStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(TrendStatus::Validation, message.into())
}

fn set_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("NULs replaced"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TrendStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (TrendStatus::Ok, None),
        Ok(Err(Failure(status, message))) => (status, Some(message)),
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (TrendStatus::Panic, Some(format!("panic: {what}")))
        }
    };
    set_error(message);
    status
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(TrendStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    get(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(TrendStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T: Copy>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(TrendStatus::NullPointer, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

/// Copy `values` into `dst` unless `dst` is null.
unsafe fn fill<T: Copy>(dst: *mut T, len: usize, values: impl ExactSizeIterator<Item = T>) -> Result<(), Failure> {
    if dst.is_null() {
        return Ok(());
    }
    if values.len() != len {
        return Err(invalid(format!(
            "buffer length {len} does not match series length {}",
            values.len()
        )));
    }
    for (i, v) in values.enumerate() {
        *dst.add(i) = v;
    }
    Ok(())
}

fn date_from(yyyymmdd: i32) -> Result<NaiveDate, Failure> {
    NaiveDate::from_ymd_opt(yyyymmdd / 10000, (yyyymmdd / 100 % 100) as u32, (yyyymmdd % 100) as u32)
        .ok_or_else(|| invalid(format!("invalid date {yyyymmdd}")))
}

fn date_to(d: NaiveDate) -> i32 {
    d.year() * 10000 + d.month() as i32 * 100 + d.day() as i32
}

fn trend_config(n: f64) -> Result<TrendConfig, Failure> {
    let cfg = TrendConfig {
        n,
        ..TrendConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn nan_or(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn trend_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn trend_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a series of `len` consecutive periods starting at `start_yyyymmdd`.
/// NaN closes mark absent periods.
///
/// # Safety
/// `closes` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_series_new(
    closes: *const f64,
    len: usize,
    start_yyyymmdd: i32,
    frequency: TrendFrequency,
    out: *mut *mut TrendSeries,
) -> TrendStatus {
    guard(|| {
        let closes = slice(closes, len, "closes")?;
        let frequency = match frequency {
            TrendFrequency::Monthly => Frequency::Monthly,
            TrendFrequency::Daily => Frequency::Daily,
        };
        let periods = calendar(date_from(start_yyyymmdd)?, len, frequency)
            .into_iter()
            .zip(closes)
            .map(|(label, &c)| {
                if c.is_nan() {
                    Period::absent(label)
                } else {
                    Period::observed(label, c)
                }
            })
            .collect();
        put(out, TrendSeries(PriceSeries::new(periods, frequency)?))
    })
}

/// # Safety
/// `series` must be null or a handle from `trend_series_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn trend_series_free(series: *mut TrendSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of periods, or 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn trend_series_len(series: *const TrendSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Compute signals with EMA timescale `n` periods.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_signals_compute(
    series: *const TrendSeries,
    n: f64,
    out: *mut *mut TrendSignals,
) -> TrendStatus {
    guard(|| {
        let series = get(series, "series")?;
        put(out, TrendSignals(compute_signal(&series.0, &trend_config(n)?)?))
    })
}

/// # Safety
/// `signals` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn trend_signals_free(signals: *mut TrendSignals) {
    if !signals.is_null() {
        drop(Box::from_raw(signals));
    }
}

/// # Safety
/// `signals` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn trend_signals_len(signals: *const TrendSignals) -> usize {
    signals.as_ref().map_or(0, |s| s.0.len())
}

/// Copy signal columns into caller buffers of length `len`. Any buffer may
/// be null to skip that column; `valid` receives 0 or 1.
///
/// # Safety
/// Non-null buffers must have room for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn trend_signals_copy(
    signals: *const TrendSignals,
    signal: *mut f64,
    ref_price: *mut f64,
    vol: *mut f64,
    valid: *mut u8,
    len: usize,
) -> TrendStatus {
    guard(|| {
        let pts = &get(signals, "signals")?.0.points;
        fill(signal, len, pts.iter().map(|p| p.signal))?;
        fill(ref_price, len, pts.iter().map(|p| p.ref_price))?;
        fill(vol, len, pts.iter().map(|p| p.vol))?;
        fill(valid, len, pts.iter().map(|p| p.valid as u8))
    })
}

/// Trend-following P&L: sign(signal) times the σ-normalized next change.
///
/// # Safety
/// Both handles must be live and computed from the same series.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_trend(
    series: *const TrendSeries,
    signals: *const TrendSignals,
    out: *mut *mut TrendPnl,
) -> TrendStatus {
    guard(|| {
        let (s, g) = (get(series, "series")?, get(signals, "signals")?);
        put(out, TrendPnl(instrument_pnl("series", &s.0, &g.0)?))
    })
}

/// Long-only P&L on the same risk scale.
///
/// # Safety
/// As for `trend_pnl_trend`.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_long(
    series: *const TrendSeries,
    signals: *const TrendSignals,
    out: *mut *mut TrendPnl,
) -> TrendStatus {
    guard(|| {
        let (s, g) = (get(series, "series")?, get(signals, "signals")?);
        put(out, TrendPnl(longonly_pnl("series", &s.0, &g.0)?))
    })
}

/// Sum of `count` P&L series over the union of their dates.
///
/// # Safety
/// `items` must point to `count` live handles.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_aggregate(
    items: *const *const TrendPnl,
    count: usize,
    out: *mut *mut TrendPnl,
) -> TrendStatus {
    guard(|| {
        let items = slice(items, count, "items")?;
        let pnls = items
            .iter()
            .map(|&p| get(p, "items[i]").map(|p| &p.0))
            .collect::<Result<Vec<_>, _>>()?;
        put(out, TrendPnl(aggregate(&pnls)?))
    })
}

/// # Safety
/// `pnl` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_free(pnl: *mut TrendPnl) {
    if !pnl.is_null() {
        drop(Box::from_raw(pnl));
    }
}

/// # Safety
/// `pnl` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_len(pnl: *const TrendPnl) -> usize {
    pnl.as_ref().map_or(0, |p| p.0.points.len())
}

/// Copy dates, values and validity flags; any buffer may be null.
///
/// # Safety
/// Non-null buffers must have room for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_copy(
    pnl: *const TrendPnl,
    dates: *mut i32,
    values: *mut f64,
    valid: *mut u8,
    len: usize,
) -> TrendStatus {
    guard(|| {
        let pts = &get(pnl, "pnl")?.0.points;
        fill(dates, len, pts.iter().map(|p| date_to(p.label)))?;
        fill(values, len, pts.iter().map(|p| p.pnl))?;
        fill(valid, len, pts.iter().map(|p| p.valid as u8))
    })
}

/// # Safety
/// `pnl` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_sharpe(pnl: *const TrendPnl, out: *mut TrendSharpe) -> TrendStatus {
    guard(|| {
        let s = sharpe_and_tstat(&get(pnl, "pnl")?.0)?;
        write(
            out,
            TrendSharpe {
                sharpe: s.sharpe,
                tstat: s.tstat,
                n_years: s.n_years,
                count: s.count,
            },
        )
    })
}

/// Remove the projection of `trend` on `long` and report what is left.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trend_pnl_debias(
    trend: *const TrendPnl,
    long: *const TrendPnl,
    out: *mut TrendDebiased,
) -> TrendStatus {
    guard(|| {
        let d = debias(&get(trend, "trend")?.0, &get(long, "long")?.0)?;
        write(
            out,
            TrendDebiased {
                beta: d.beta,
                correlation: d.correlation,
                tstat_debiased: d.tstat_debiased,
            },
        )
    })
}

/// Fit `model` to the points (s[i], d[i]).
///
/// # Safety
/// `s` and `d` must each point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn trend_fit(
    s: *const f64,
    d: *const f64,
    len: usize,
    model: TrendModel,
    out: *mut TrendFit,
) -> TrendStatus {
    guard(|| {
        let pairs: Vec<(f64, f64)> = slice(s, len, "s")?
            .iter()
            .copied()
            .zip(slice(d, len, "d")?.iter().copied())
            .collect();
        let scatter = ScatterSet::from_pairs(&pairs, Normalization::SigmaNormalized);
        let f: FitResult = match model {
            TrendModel::Linear => fit_linear(&scatter)?,
            TrendModel::Cubic => fit_cubic(&scatter)?,
            TrendModel::Tanh => fit_tanh(&scatter)?,
        };
        let se = |i: usize| nan_or(f.stderr.get(i).copied());
        write(
            out,
            TrendFit {
                model,
                a: f.a,
                b: f.b,
                b2: nan_or(f.b2),
                b3: nan_or(f.b3),
                s_star: nan_or(f.s_star),
                stderr_a: se(0),
                stderr_b: se(1),
                stderr_b2: se(2),
                stderr_b3: se(3),
                sse: f.sse,
                n_points: f.n_points,
                linear_limit: f.linear_limit,
            },
        )
    })
}

/// Load a manifest, run every instrument with timescale `n`, and return the
/// aggregate trend P&L and its headline statistics. Either output may be
/// null.
///
/// # Safety
/// `manifest_path` must be a NUL-terminated UTF-8 path.
#[no_mangle]
pub unsafe extern "C" fn trend_backtest_manifest(
    manifest_path: *const c_char,
    n: f64,
    out_aggregate: *mut *mut TrendPnl,
    out_stats: *mut TrendStats,
) -> TrendStatus {
    guard(|| {
        get(manifest_path, "manifest_path")?;
        let path = CStr::from_ptr(manifest_path)
            .to_str()
            .map_err(|_| invalid("manifest path is not UTF-8"))?;
        let cfg = trend_config(n)?;
        let runs = run_pool(&load_pool(&load_manifest(path)?)?, &cfg)?;
        let trend = aggregate(&runs.iter().map(|r| &r.trend).collect::<Vec<_>>())?;
        let long = aggregate(&runs.iter().map(|r| &r.long).collect::<Vec<_>>())?;
        if !out_stats.is_null() {
            let r = stats_report(&trend, &long)?;
            *out_stats = TrendStats {
                sharpe: r.sharpe,
                tstat: r.tstat,
                tstat_debiased: r.tstat_debiased,
                beta: r.beta,
                correlation_long: r.correlation_long,
                drift_sharpe: r.drift_sharpe,
                drift_tstat: r.drift_tstat,
                n_years: r.n_years,
            };
        }
        if !out_aggregate.is_null() {
            put(out_aggregate, TrendPnl(trend))?;
        }
        Ok(())
    })
}
