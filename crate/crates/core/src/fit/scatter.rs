use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Instrument, PriceSeries};
use crate::signal::{compute_signal, SignalSeries, TrendConfig};

/// How the next-period price change is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `p(t+1) - p(t)` in price units.
    RawChange,
    /// `(p(t+1) - p(t)) / σ(t-1)`.
    #[default]
    SigmaNormalized,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::RawChange => "raw",
            Normalization::SigmaNormalized => "sigma",
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "raw_change" => Ok(Normalization::RawChange),
            "sigma" | "sigma_normalized" => Ok(Normalization::SigmaNormalized),
            other => Err(Error::config(format!("unknown normalization \"{other}\""))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    /// Signal at t.
    pub s: f64,
    /// Change from t to t+1.
    pub d: f64,
    pub id: String,
    pub label: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSet {
    pub points: Vec<ScatterPoint>,
    pub normalization: Normalization,
}

impl ScatterSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub(crate) fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.s, p.d)).collect()
    }

    /// Unlabeled scatter from raw `(s, d)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], normalization: Normalization) -> Self {
        let label = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap_or_default();
        ScatterSet {
            points: pairs
                .iter()
                .map(|&(s, d)| ScatterPoint {
                    s,
                    d,
                    id: String::new(),
                    label,
                })
                .collect(),
            normalization,
        }
    }
}

/// Scatter points of one instrument given its precomputed signals.
pub fn instrument_scatter(
    id: &str,
    series: &PriceSeries,
    signals: &SignalSeries,
    normalization: Normalization,
) -> Vec<ScatterPoint> {
    (0..series.len().min(signals.len()))
        .filter_map(|t| {
            let sp = &signals.points[t];
            if !sp.valid {
                return None;
            }
            let p0 = series.usable(t)?;
            let p1 = series.usable(t + 1)?;
            let d = match normalization {
                Normalization::RawChange => p1 - p0,
                Normalization::SigmaNormalized => (p1 - p0) / signals.sigma_for(t)?,
            };
            Some(ScatterPoint {
                s: sp.signal,
                d,
                id: id.to_string(),
                label: sp.label,
            })
        })
        .collect()
}

/// Pool every instrument's (signal, next change) pairs.
pub fn build_scatter(
    instruments: &[Instrument],
    cfg: &TrendConfig,
    normalization: Normalization,
) -> Result<ScatterSet> {
    let per: Vec<Vec<ScatterPoint>> = instruments
        .par_iter()
        .map(|inst| {
            let signals = compute_signal(&inst.series, cfg)?;
            Ok(instrument_scatter(&inst.id, &inst.series, &signals, normalization))
        })
        .collect::<Result<_>>()?;
    let points: Vec<ScatterPoint> = per.into_iter().flatten().collect();
    if points.is_empty() {
        return Err(Error::EmptyScatter);
    }
    Ok(ScatterSet { points, normalization })
}
