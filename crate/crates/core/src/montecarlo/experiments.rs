//! Monte Carlo oracles for the backtest statistics.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::stream_rng;
use super::synth::{generate_stream, SynthModel, SynthSpec};
use crate::backtest::{debias, drawdowns, run_instrument, PnlPoint, PnlSeries};
use crate::error::{Error, Result};
use crate::fit::ols_slope;
use crate::series::{calendar, Frequency, Instrument, Sector};
use crate::signal::TrendConfig;

/// Fewer trials than this make a distribution summary meaningless.
pub const MIN_TRIALS: usize = 100;
pub const QUANTILE_PROBS: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n_trials: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub stdev: f64,
    pub quantiles: Vec<Quantile>,
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Result<McSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no Monte Carlo values to summarize"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stdev = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(McSummary {
        n_trials: values.len(),
        mean,
        stdev,
        quantiles: QUANTILE_PROBS
            .iter()
            .map(|&p| Quantile {
                p,
                value: quantile(&sorted, p),
            })
            .collect(),
    })
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::config(format!(
            "at least {MIN_TRIALS} trials are required, got {trials}"
        )));
    }
    Ok(())
}

fn periods_for(years: f64, frequency: Frequency) -> Result<usize> {
    if !years.is_finite() || years <= 0.0 {
        return Err(Error::config(format!("years must be positive, got {years}")));
    }
    Ok((years * frequency.periods_per_year()).round() as usize)
}

/// Outcome of the full pipeline on one synthetic instrument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub tstat_debiased: f64,
    pub total_pnl: f64,
    pub regenerations: u32,
}

/// Generate trial `trial` of `spec` and run signal, backtest and de-biasing.
pub fn run_trial(spec: &SynthSpec, trial: u64, cfg: &TrendConfig) -> Result<TrialOutcome> {
    let synth = generate_stream(spec, trial, 0)?;
    let inst = Instrument {
        id: format!("trial{trial}"),
        sector: Sector::Index,
        series: synth.series,
    };
    let run = run_instrument(&inst, cfg)?;
    let deb = debias(&run.trend, &run.long)?;
    Ok(TrialOutcome {
        tstat_debiased: deb.tstat_debiased,
        total_pnl: run.trend.valid_values().iter().sum(),
        regenerations: synth.regenerations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullRun {
    pub summary: McSummary,
    /// De-biased t-stat per trial, in trial order.
    pub tstats: Vec<f64>,
    /// Fraction of trials with t-stat ≥ 5.
    pub tail_ge_5: f64,
    pub regenerations: u64,
}

/// Distribution of the de-biased t-stat on driftless random walks.
///
/// `spec.n_periods` is replaced by `years` worth of periods.
pub fn null_tstat_distribution(trials: usize, spec: &SynthSpec, cfg: &TrendConfig, years: f64) -> Result<NullRun> {
    check_trials(trials)?;
    if spec.model != SynthModel::RandomWalk {
        return Err(Error::config("the null experiment needs a random_walk model"));
    }
    let spec = SynthSpec {
        n_periods: periods_for(years, spec.frequency)?,
        ..spec.clone()
    };
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&spec, t, cfg))
        .collect::<Result<_>>()?;
    let tstats: Vec<f64> = outcomes.iter().map(|o| o.tstat_debiased).collect();
    Ok(NullRun {
        summary: summarize(&tstats)?,
        tail_ge_5: tstats.iter().filter(|&&t| t >= 5.0).count() as f64 / trials as f64,
        regenerations: outcomes.iter().map(|o| u64::from(o.regenerations)).sum(),
        tstats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub kappa: f64,
    pub summary: McSummary,
    pub mean_total_pnl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTable {
    pub m: f64,
    pub years: f64,
    pub rows: Vec<PowerRow>,
    /// Mean t-stat non-decreasing down the κ column.
    pub monotone: bool,
    /// Share of noise paths whose total P&L is non-decreasing in κ.
    pub coupled_fraction: f64,
    pub regenerations: u64,
}

/// Detection power on the feedback-trend model over a grid of κ.
///
/// Trial `i` uses the same noise stream at every κ.
pub fn planted_trend_power(
    trials: usize,
    kappas: &[f64],
    m: f64,
    years: f64,
    monthly_vol: f64,
    seed: u64,
    cfg: &TrendConfig,
) -> Result<PowerTable> {
    check_trials(trials)?;
    if kappas.is_empty()
        || kappas
            .windows(2)
            .any(|w| w[0].is_nan() || w[1].is_nan() || w[1] <= w[0])
    {
        return Err(Error::config("kappa grid must be non-empty and strictly increasing"));
    }
    let n_periods = periods_for(years, Frequency::Monthly)?;
    let specs: Vec<SynthSpec> = kappas
        .iter()
        .map(|&kappa| {
            let s = SynthSpec::new(SynthModel::FeedbackTrend { kappa, m }, n_periods, monthly_vol, seed);
            s.validate().map(|_| s)
        })
        .collect::<Result<_>>()?;
    // per trial: one outcome per kappa
    let paths: Vec<Vec<TrialOutcome>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| specs.iter().map(|s| run_trial(s, t, cfg)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let rows: Vec<PowerRow> = kappas
        .iter()
        .enumerate()
        .map(|(k, &kappa)| {
            let ts: Vec<f64> = paths.iter().map(|p| p[k].tstat_debiased).collect();
            Ok(PowerRow {
                kappa,
                summary: summarize(&ts)?,
                mean_total_pnl: paths.iter().map(|p| p[k].total_pnl).sum::<f64>() / trials as f64,
            })
        })
        .collect::<Result<_>>()?;
    let monotone = rows.windows(2).all(|w| w[1].summary.mean >= w[0].summary.mean);
    let coupled = paths
        .iter()
        .filter(|p| p.windows(2).all(|w| w[1].total_pnl >= w[0].total_pnl))
        .count();
    Ok(PowerTable {
        m,
        years,
        rows,
        monotone,
        coupled_fraction: coupled as f64 / trials as f64,
        regenerations: paths.iter().flatten().map(|o| u64::from(o.regenerations)).sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawdownRow {
    pub sharpe: f64,
    pub n_completed: usize,
    pub n_open: usize,
    /// Over completed drawdowns, each counted once.
    pub mean_years: f64,
    pub median_years: f64,
    /// Over completed drawdowns weighted by their own duration: the
    /// duration of the drawdown a randomly chosen underwater period is in.
    pub weighted_mean_years: f64,
    pub weighted_median_years: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawdownScaling {
    pub years: f64,
    pub frequency: Frequency,
    pub rows: Vec<DrawdownRow>,
    /// OLS slopes of log duration on log Sharpe; `None` with fewer than two
    /// usable Sharpe values.
    pub slope_median: Option<f64>,
    pub slope_mean: Option<f64>,
    pub slope_weighted_median: Option<f64>,
    pub slope_weighted_mean: Option<f64>,
}

/// Per-period P&L with annualized Sharpe `sharpe` and unit variance.
pub fn iid_pnl(sharpe: f64, n: usize, frequency: Frequency, seed: u64, trial: u64) -> PnlSeries {
    let mu = sharpe / frequency.periods_per_year().sqrt();
    let mut rng = stream_rng(seed, trial, 0, 0);
    let start = chrono::NaiveDate::from_ymd_opt(1900, 1, 31).expect("valid date");
    let points = calendar(start, n, frequency)
        .into_iter()
        .map(|label| {
            let z: f64 = StandardNormal.sample(&mut rng);
            PnlPoint {
                label,
                pnl: mu + z,
                valid: true,
                active: 1,
            }
        })
        .collect();
    PnlSeries {
        id: format!("iid{trial}"),
        frequency,
        points,
    }
}

fn weighted_median(sorted: &[f64]) -> f64 {
    let total: f64 = sorted.iter().sum();
    let mut acc = 0.0;
    for &d in sorted {
        acc += d;
        if acc >= 0.5 * total {
            return d;
        }
    }
    f64::NAN
}

/// Drawdown durations of iid strategies across a grid of Sharpe ratios.
///
/// Trial `i` reuses the same Gaussian draws at every Sharpe ratio.
pub fn drawdown_scaling(
    sharpes: &[f64],
    trials: usize,
    years: f64,
    frequency: Frequency,
    seed: u64,
) -> Result<DrawdownScaling> {
    if sharpes.is_empty() {
        return Err(Error::EmptyInput("no Sharpe ratios"));
    }
    if let Some(s) = sharpes.iter().find(|s| !s.is_finite() || **s <= 0.0) {
        return Err(Error::config(format!("Sharpe ratios must be positive, got {s}")));
    }
    if trials == 0 {
        return Err(Error::config("at least one trial is required"));
    }
    let n = periods_for(years, frequency)?;
    let rows: Vec<DrawdownRow> = sharpes
        .iter()
        .map(|&sharpe| {
            let per_trial: Vec<(Vec<f64>, usize)> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let dd = drawdowns(&iid_pnl(sharpe, n, frequency, seed, t));
                    let open = dd.iter().filter(|d| d.is_open()).count();
                    (
                        dd.iter().filter(|d| !d.is_open()).map(|d| d.duration_years).collect(),
                        open,
                    )
                })
                .collect();
            let n_open = per_trial.iter().map(|p| p.1).sum();
            let mut completed: Vec<f64> = per_trial.into_iter().flat_map(|p| p.0).collect();
            completed.sort_by(f64::total_cmp);
            let count = completed.len() as f64;
            let total: f64 = completed.iter().sum();
            DrawdownRow {
                sharpe,
                n_completed: completed.len(),
                n_open,
                mean_years: total / count,
                median_years: quantile(&completed, 0.5),
                weighted_mean_years: completed.iter().map(|d| d * d).sum::<f64>() / total,
                weighted_median_years: weighted_median(&completed),
            }
        })
        .collect();
    let slope = |f: fn(&DrawdownRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| f(r) > 0.0 && f(r).is_finite())
            .map(|r| (r.sharpe.ln(), f(r).ln()))
            .collect();
        ols_slope(&pts)
    };
    Ok(DrawdownScaling {
        years,
        frequency,
        slope_median: slope(|r| r.median_years),
        slope_mean: slope(|r| r.mean_years),
        slope_weighted_median: slope(|r| r.weighted_median_years),
        slope_weighted_mean: slope(|r| r.weighted_mean_years),
        rows,
    })
}

fn default_vol() -> f64 {
    1.0
}

fn default_m() -> f64 {
    5.0
}

/// Experiment description as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Null {
        trials: usize,
        years: f64,
        #[serde(default = "default_vol")]
        monthly_vol: f64,
    },
    Power {
        trials: usize,
        kappas: Vec<f64>,
        #[serde(default = "default_m")]
        m: f64,
        years: f64,
        #[serde(default = "default_vol")]
        monthly_vol: f64,
    },
    DrawdownScaling {
        sharpes: Vec<f64>,
        trials: usize,
        years: f64,
        #[serde(default)]
        frequency: Frequency,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutput {
    Null(NullRun),
    Power(PowerTable),
    DrawdownScaling(DrawdownScaling),
}

pub fn run_experiment(experiment: &Experiment, seed: u64, cfg: &TrendConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match experiment {
        Experiment::Null {
            trials,
            years,
            monthly_vol,
        } => {
            let spec = SynthSpec::new(SynthModel::RandomWalk, 2, *monthly_vol, seed);
            null_tstat_distribution(*trials, &spec, cfg, *years).map(ExperimentOutput::Null)
        }
        Experiment::Power {
            trials,
            kappas,
            m,
            years,
            monthly_vol,
        } => planted_trend_power(*trials, kappas, *m, *years, *monthly_vol, seed, cfg).map(ExperimentOutput::Power),
        Experiment::DrawdownScaling {
            sharpes,
            trials,
            years,
            frequency,
        } => drawdown_scaling(sharpes, *trials, *years, *frequency, seed).map(ExperimentOutput::DrawdownScaling),
    }
}
