//! Sharpe ratio, t-stat, de-biasing against the long-only leg, and
//! correlation of strategy P&L.

use serde::{Deserialize, Serialize};

use super::pnl::{PnlPoint, PnlSeries};
use crate::error::{Error, Result};
use crate::series::{overlap_points, Frequency, ReturnPoint};

/// Minimum number of valid periods for any reported statistic.
pub const MIN_PERIODS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpeStats {
    /// Annualized: mean / stdev · √P.
    pub sharpe: f64,
    /// `sharpe · √n_years`.
    pub tstat: f64,
    pub n_years: f64,
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub stdev: f64,
}

/// Annualized Sharpe ratio and t-stat of a sample of per-period returns.
pub fn sharpe_of(values: &[f64], frequency: Frequency) -> Result<SharpeStats> {
    let count = values.len();
    if count < MIN_PERIODS {
        return Err(Error::TooShort {
            needed: MIN_PERIODS,
            available: count,
        });
    }
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let stdev = var.sqrt();
    if stdev.is_nan() || stdev <= 1e-14 * mean.abs() {
        return Err(Error::ZeroVariance);
    }
    let periods_per_year = frequency.periods_per_year();
    let sharpe = mean * periods_per_year / (stdev * periods_per_year.sqrt());
    let n_years = n / periods_per_year;
    Ok(SharpeStats {
        sharpe,
        tstat: sharpe * n_years.sqrt(),
        n_years,
        count,
        mean,
        stdev,
    })
}

/// Sharpe ratio and t-stat over the valid periods of a P&L series.
pub fn sharpe_and_tstat(pnl: &PnlSeries) -> Result<SharpeStats> {
    sharpe_of(&pnl.valid_values(), pnl.frequency)
}

/// Pearson correlation; 0 when either side has no dispersion.
pub fn pearson(pairs: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let (mut n, mut sa, mut sb) = (0.0, 0.0, 0.0);
    for (a, b) in pairs.clone() {
        n += 1.0;
        sa += a;
        sb += b;
    }
    if n == 0.0 {
        return 0.0;
    }
    let (ma, mb) = (sa / n, sb / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (a, b) in pairs {
        cov += (a - ma) * (b - mb);
        va += (a - ma).powi(2);
        vb += (b - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    (cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0)
}

fn as_returns(p: &PnlSeries) -> Vec<ReturnPoint> {
    p.points
        .iter()
        .map(|q| ReturnPoint {
            label: q.label,
            value: q.pnl,
            valid: q.valid,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Debiased {
    /// No-intercept regression slope of trend P&L on long-only P&L.
    pub beta: f64,
    pub correlation: f64,
    /// `trend - beta · long` on the overlap.
    pub residual: PnlSeries,
    pub tstat_debiased: f64,
}

/// Remove the long-only projection from the trend P&L.
pub fn debias(trend: &PnlSeries, long: &PnlSeries) -> Result<Debiased> {
    let pairs = overlap_points(&as_returns(trend), &as_returns(long));
    if pairs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let sll: f64 = pairs.iter().map(|p| p.b * p.b).sum();
    if sll == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sql: f64 = pairs.iter().map(|p| p.a * p.b).sum();
    let beta = sql / sll;
    let correlation = pearson(pairs.iter().map(|p| (p.a, p.b)));
    let residual_points: Vec<PnlPoint> = pairs
        .iter()
        .map(|p| PnlPoint {
            label: p.label,
            pnl: p.a - beta * p.b,
            valid: true,
            active: 1,
        })
        .collect();
    let scale = pairs.iter().fold(0.0_f64, |m, p| m.max(p.a.abs()));
    let all_zero = residual_points.iter().all(|p| p.pnl.abs() <= 1e-12 * scale);
    let residual = PnlSeries {
        id: trend.id.clone(),
        frequency: trend.frequency,
        points: residual_points,
    };
    let tstat_debiased = if all_zero {
        if residual.points.len() < MIN_PERIODS {
            return Err(Error::TooShort {
                needed: MIN_PERIODS,
                available: residual.points.len(),
            });
        }
        0.0
    } else {
        sharpe_and_tstat(&residual)?.tstat
    };
    Ok(Debiased {
        beta,
        correlation,
        residual,
        tstat_debiased,
    })
}

/// Pearson correlation of two strategies' P&L over their valid overlap.
pub fn proxy_correlation(a: &PnlSeries, b: &PnlSeries) -> Result<f64> {
    let pairs = overlap_points(&as_returns(a), &as_returns(b));
    if pairs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    if pairs.len() < MIN_PERIODS {
        return Err(Error::TooShort {
            needed: MIN_PERIODS,
            available: pairs.len(),
        });
    }
    Ok(pearson(pairs.iter().map(|p| (p.a, p.b))))
}

/// Headline statistics of a trend P&L and its long-only drift leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub sharpe: f64,
    pub tstat: f64,
    pub tstat_debiased: f64,
    pub beta: f64,
    pub correlation_long: f64,
    pub drift_sharpe: f64,
    pub drift_tstat: f64,
    pub n_years: f64,
}

pub fn stats_report(trend: &PnlSeries, long: &PnlSeries) -> Result<StatsReport> {
    let t = sharpe_and_tstat(trend)?;
    let d = sharpe_and_tstat(long)?;
    let deb = debias(trend, long)?;
    Ok(StatsReport {
        sharpe: t.sharpe,
        tstat: t.tstat,
        tstat_debiased: deb.tstat_debiased,
        beta: deb.beta,
        correlation_long: deb.correlation,
        drift_sharpe: d.sharpe,
        drift_tstat: d.tstat,
        n_years: t.n_years,
    })
}
