use chrono::NaiveDate;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, MAX_ATTEMPTS};
use crate::error::{Error, Result};
use crate::series::{Frequency, PriceSeries};

/// Prices below this fraction of `p0` trigger a regeneration.
pub const PRICE_FLOOR_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SynthModel {
    RandomWalk,
    /// Increments `κ·m(t-1) + η(t)` where `m` is the EMA (decay `m`) of past
    /// increments.
    FeedbackTrend {
        kappa: f64,
        m: f64,
    },
    DriftedWalk {
        drift: f64,
    },
}

fn default_p0() -> f64 {
    100.0
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(1900, 1, 31).expect("valid date")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub model: SynthModel,
    pub n_periods: usize,
    /// Standard deviation of the Gaussian increment per period.
    pub monthly_vol: f64,
    pub seed: u64,
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default = "default_start")]
    pub start: NaiveDate,
    #[serde(default)]
    pub frequency: Frequency,
}

impl SynthSpec {
    pub fn new(model: SynthModel, n_periods: usize, monthly_vol: f64, seed: u64) -> Self {
        SynthSpec {
            model,
            n_periods,
            monthly_vol,
            seed,
            p0: default_p0(),
            start: default_start(),
            frequency: Frequency::Monthly,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_periods < 2 {
            return Err(Error::config(format!(
                "n_periods must be at least 2, got {}",
                self.n_periods
            )));
        }
        if !self.monthly_vol.is_finite() || self.monthly_vol < 0.0 {
            return Err(Error::config(format!(
                "monthly_vol must be non-negative, got {}",
                self.monthly_vol
            )));
        }
        if !self.p0.is_finite() || self.p0 <= 0.0 {
            return Err(Error::config(format!("p0 must be positive, got {}", self.p0)));
        }
        match self.model {
            SynthModel::RandomWalk => {}
            SynthModel::DriftedWalk { drift } => {
                if !drift.is_finite() {
                    return Err(Error::config("drift must be finite"));
                }
            }
            SynthModel::FeedbackTrend { kappa, m } => {
                if !m.is_finite() || m <= 0.0 || !kappa.is_finite() {
                    return Err(Error::config("feedback model needs finite kappa and positive m"));
                }
                // m(t) = (1 - (1 - κ)/m)·m(t-1) + η/m
                let root = 1.0 - (1.0 - kappa) / m;
                if kappa >= 1.0 || root.abs() >= 1.0 {
                    return Err(Error::config(format!(
                        "explosive feedback model (kappa = {kappa}, m = {m})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A generated path and the number of floor-triggered regenerations.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub series: PriceSeries,
    pub regenerations: u32,
}

fn path(spec: &SynthSpec, trial: u64, instrument: u64, attempt: u64) -> Option<Vec<f64>> {
    let mut rng = stream_rng(spec.seed, trial, instrument, attempt);
    let floor = PRICE_FLOOR_FRACTION * spec.p0;
    let mut closes = Vec::with_capacity(spec.n_periods);
    let mut p = spec.p0;
    let mut ema = 0.0;
    closes.push(p);
    for _ in 1..spec.n_periods {
        let z: f64 = StandardNormal.sample(&mut rng);
        let eta = spec.monthly_vol * z;
        let eps = match spec.model {
            SynthModel::RandomWalk => eta,
            SynthModel::DriftedWalk { drift } => drift + eta,
            SynthModel::FeedbackTrend { kappa, m } => {
                let e = kappa * ema + eta;
                ema += (e - ema) / m;
                e
            }
        };
        p += eps;
        if p < floor {
            return None;
        }
        closes.push(p);
    }
    Some(closes)
}

/// Generate the path of one (trial, instrument) stream.
pub fn generate_stream(spec: &SynthSpec, trial: u64, instrument: u64) -> Result<Synthetic> {
    spec.validate()?;
    let deterministic = spec.monthly_vol == 0.0;
    for attempt in 0..MAX_ATTEMPTS {
        if let Some(closes) = path(spec, trial, instrument, attempt) {
            let series = PriceSeries::from_closes(spec.start, &closes, spec.frequency)?;
            return Ok(Synthetic {
                series,
                regenerations: attempt as u32,
            });
        }
        if deterministic {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "synthetic path kept hitting the price floor (trial {trial}, instrument {instrument})"
    )))
}

/// Generate the default stream of a spec.
pub fn generate(spec: &SynthSpec) -> Result<PriceSeries> {
    generate_stream(spec, 0, 0).map(|s| s.series)
}
