//! EMA reference price, EMA volatility and the normalized trend signal.
//!
//! For period `t`:
//!
//! * `ref_price(t)` is the EMA (decay `n`, `α = 1/n`) of closes up to and
//!   including `p(t-1)`, seeded with the first usable close;
//! * `vol(t)` is the EMA of `|p(t') - p(t'-1)|` over changes up to and
//!   including `p(t) - p(t-1)`, seeded with the first usable change;
//! * `signal(t) = (p(t-1) - ref_price(t-1)) / vol(t-1)`.
//!
//! Both estimators freeze across absent or excluded periods, and a change
//! spanning such a period is never fed to the volatility EMA. The
//! alternative decay convention `α = 1 - exp(-1/n)` differs at `O(1/n²)`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Period, PriceSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendConfig {
    /// Decay timescale in periods of the series.
    pub n: f64,
    /// Warm-up length in units of `n`.
    pub warmup_multiplier: f64,
    /// Volatility below which signals are invalid, in price units.
    pub vol_floor: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            n: 5.0,
            warmup_multiplier: 3.0,
            vol_floor: 1e-12,
        }
    }
}

impl TrendConfig {
    pub fn with_n(n: f64) -> Self {
        TrendConfig {
            n,
            ..TrendConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(Error::config(format!("n must be >= 1, got {}", self.n)));
        }
        if !(self.warmup_multiplier.is_finite() && self.warmup_multiplier >= 1.0) {
            return Err(Error::config(format!(
                "warmup_multiplier must be >= 1, got {}",
                self.warmup_multiplier
            )));
        }
        if !(self.vol_floor.is_finite() && self.vol_floor > 0.0) {
            return Err(Error::config("vol_floor must be positive"));
        }
        Ok(())
    }

    /// Number of updates each estimator needs before its output is trusted.
    pub fn warmup_periods(&self) -> usize {
        (self.warmup_multiplier * self.n).ceil() as usize
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.n
    }
}

/// One EMA step with `α = 1/n`.
#[inline]
pub fn ema_update(prev: f64, observation: f64, n: f64) -> f64 {
    let alpha = 1.0 / n;
    prev + alpha * (observation - prev)
}

/// Position implied by a signal: `+1`, `-1`, or `0` for an exact zero.
#[inline]
pub fn sign_position(signal: f64) -> f64 {
    if signal > 0.0 {
        1.0
    } else if signal < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalPoint {
    pub label: NaiveDate,
    /// EMA of closes through `p(t-1)`; NaN before the first close.
    pub ref_price: f64,
    /// EMA of absolute changes through `p(t) - p(t-1)`; NaN before the first change.
    pub vol: f64,
    pub signal: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSeries {
    pub points: Vec<SignalPoint>,
}

impl SignalSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// σ used to normalize the position held over period `t`, i.e. `vol(t-1)`.
    #[inline]
    pub fn sigma_for(&self, t: usize) -> Option<f64> {
        t.checked_sub(1).map(|i| self.points[i].vol)
    }
}

/// Incremental signal computation, one period at a time.
#[derive(Debug, Clone)]
pub struct SignalState {
    cfg: TrendConfig,
    warmup: usize,
    ref_ema: Option<f64>,
    ref_updates: usize,
    vol_ema: Option<f64>,
    vol_updates: usize,
    /// Usable close of the previous period, if any.
    prev_close: Option<f64>,
    /// Snapshot of the previous row: (usable close, ref_price, ref count, vol, vol count).
    prev_row: Option<RowState>,
    /// Whether the period before the previous one was usable.
    prev_prev_usable: bool,
}

#[derive(Debug, Clone, Copy)]
struct RowState {
    close: Option<f64>,
    ref_price: Option<f64>,
    ref_updates: usize,
    vol: Option<f64>,
    vol_updates: usize,
}

impl SignalState {
    pub fn new(cfg: TrendConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(SignalState {
            cfg,
            warmup: cfg.warmup_periods(),
            ref_ema: None,
            ref_updates: 0,
            vol_ema: None,
            vol_updates: 0,
            prev_close: None,
            prev_row: None,
            prev_prev_usable: false,
        })
    }

    pub fn push(&mut self, period: &Period) -> SignalPoint {
        let n = self.cfg.n;
        let close = period.usable();
        let row = RowState {
            close,
            ref_price: self.ref_ema,
            ref_updates: self.ref_updates,
            vol: None,
            vol_updates: 0,
        };

        if let (Some(c), Some(pc)) = (close, self.prev_close) {
            let change = (c - pc).abs();
            self.vol_ema = Some(match self.vol_ema {
                Some(v) => ema_update(v, change, n),
                None => change,
            });
            self.vol_updates += 1;
        }
        let row = RowState {
            vol: self.vol_ema,
            vol_updates: self.vol_updates,
            ..row
        };
        if let Some(c) = close {
            self.ref_ema = Some(match self.ref_ema {
                Some(r) => ema_update(r, c, n),
                None => c,
            });
            self.ref_updates += 1;
        }

        let (signal, valid) = match self.prev_row {
            Some(prev) => {
                let fed = close.is_some() && self.prev_prev_usable;
                match (prev.close, prev.ref_price, prev.vol) {
                    (Some(p1), Some(r1), Some(v1)) if fed => {
                        let s = (p1 - r1) / v1;
                        let ok = prev.ref_updates >= self.warmup
                            && prev.vol_updates >= self.warmup
                            && v1 > self.cfg.vol_floor
                            && s.is_finite();
                        (if ok { s } else { 0.0 }, ok)
                    }
                    _ => (0.0, false),
                }
            }
            None => (0.0, false),
        };

        self.prev_prev_usable = self.prev_row.map(|r| r.close.is_some()).unwrap_or(false);
        self.prev_close = close;
        self.prev_row = Some(row);

        SignalPoint {
            label: period.label,
            ref_price: row.ref_price.unwrap_or(f64::NAN),
            vol: row.vol.unwrap_or(f64::NAN),
            signal,
            valid,
        }
    }
}

/// Compute the full signal series of a price series.
pub fn compute_signal(series: &PriceSeries, cfg: &TrendConfig) -> Result<SignalSeries> {
    cfg.validate()?;
    let warmup = cfg.warmup_periods();
    let needed = warmup + 2;
    let available = series.usable_count();
    if available < needed {
        return Err(Error::TooShort { needed, available });
    }

    let len = series.len();
    let closes: Vec<Option<f64>> = series.periods().iter().map(Period::usable).collect();

    // Estimator trajectories, row by row.
    let mut ref_price = vec![None; len];
    let mut ref_count = vec![0usize; len];
    let mut vol = vec![None; len];
    let mut vol_count = vec![0usize; len];

    let (mut r, mut rc) = (None::<f64>, 0usize);
    for t in 0..len {
        ref_price[t] = r;
        ref_count[t] = rc;
        if let Some(c) = closes[t] {
            r = Some(r.map_or(c, |prev| ema_update(prev, c, cfg.n)));
            rc += 1;
        }
    }
    let (mut v, mut vc) = (None::<f64>, 0usize);
    for t in 0..len {
        if t > 0 {
            if let (Some(c), Some(pc)) = (closes[t], closes[t - 1]) {
                let change = (c - pc).abs();
                v = Some(v.map_or(change, |prev| ema_update(prev, change, cfg.n)));
                vc += 1;
            }
        }
        vol[t] = v;
        vol_count[t] = vc;
    }

    let points = (0..len)
        .map(|t| {
            let mut signal = 0.0;
            let mut valid = false;
            if t >= 2 && closes[t].is_some() && closes[t - 2].is_some() {
                if let (Some(p1), Some(r1), Some(v1)) = (closes[t - 1], ref_price[t - 1], vol[t - 1]) {
                    let s = (p1 - r1) / v1;
                    if ref_count[t - 1] >= warmup && vol_count[t - 1] >= warmup && v1 > cfg.vol_floor && s.is_finite() {
                        signal = s;
                        valid = true;
                    }
                }
            }
            SignalPoint {
                label: series.periods()[t].label,
                ref_price: ref_price[t].unwrap_or(f64::NAN),
                vol: vol[t].unwrap_or(f64::NAN),
                signal,
                valid,
            }
        })
        .collect();
    Ok(SignalSeries { points })
}
