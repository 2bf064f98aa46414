use std::collections::BTreeMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Frequency, Instrument, PriceSeries, Sector};
use crate::signal::{compute_signal, sign_position, SignalSeries, TrendConfig};

/// Identifier carried by pool-level aggregates.
pub const AGGREGATE_ID: &str = "AGGREGATE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnlPoint {
    /// Label of the period over which the position is held.
    pub label: NaiveDate,
    /// σ-normalized P&L; 0 when invalid.
    pub pnl: f64,
    pub valid: bool,
    /// Number of valid constituents (1 or 0 for a single instrument).
    pub active: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnlSeries {
    pub id: String,
    pub frequency: Frequency,
    pub points: Vec<PnlPoint>,
}

impl PnlSeries {
    pub fn valid_values(&self) -> Vec<f64> {
        self.points.iter().filter(|p| p.valid).map(|p| p.pnl).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.points.iter().filter(|p| p.valid).count()
    }

    /// Running sum of valid P&L, one value per period.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.points
            .iter()
            .map(|p| {
                if p.valid {
                    acc += p.pnl;
                }
                acc
            })
            .collect()
    }

    /// Keep only periods whose label satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(NaiveDate) -> bool) -> PnlSeries {
        PnlSeries {
            id: self.id.clone(),
            frequency: self.frequency,
            points: self.points.iter().filter(|p| keep(p.label)).copied().collect(),
        }
    }

    /// Per-period P&L divided by √(active constituents), keeping constant risk
    /// as the pool grows.
    pub fn rescaled_by_breadth(&self) -> PnlSeries {
        PnlSeries {
            id: self.id.clone(),
            frequency: self.frequency,
            points: self
                .points
                .iter()
                .map(|p| PnlPoint {
                    pnl: if p.active > 0 {
                        p.pnl / f64::from(p.active).sqrt()
                    } else {
                        p.pnl
                    },
                    ..*p
                })
                .collect(),
        }
    }
}

fn position_pnl(
    id: &str,
    series: &PriceSeries,
    signals: &SignalSeries,
    position: impl Fn(f64) -> f64,
) -> Result<PnlSeries> {
    if series.len() != signals.len() {
        return Err(Error::LengthMismatch {
            left: series.len(),
            right: signals.len(),
        });
    }
    let points = (0..series.len())
        .map(|t| {
            let sp = &signals.points[t];
            let realized = match (series.usable(t), series.usable(t + 1), signals.sigma_for(t)) {
                (Some(p0), Some(p1), Some(sigma)) if sp.valid => Some(position(sp.signal) * (p1 - p0) / sigma),
                _ => None,
            };
            PnlPoint {
                label: sp.label,
                pnl: realized.unwrap_or(0.0),
                valid: realized.is_some(),
                active: u32::from(realized.is_some()),
            }
        })
        .collect();
    Ok(PnlSeries {
        id: id.to_string(),
        frequency: series.frequency(),
        points,
    })
}

/// Trend P&L: `sign(s(t)) · (p(t+1) - p(t)) / σ(t-1)` on valid periods.
pub fn instrument_pnl(id: &str, series: &PriceSeries, signals: &SignalSeries) -> Result<PnlSeries> {
    position_pnl(id, series, signals, sign_position)
}

/// Long-only drift leg with the same σ-normalization and validity mask.
pub fn longonly_pnl(id: &str, series: &PriceSeries, signals: &SignalSeries) -> Result<PnlSeries> {
    position_pnl(id, series, signals, |_| 1.0)
}

/// Per-period sum across instruments on the union of period labels.
///
/// A period is valid when at least one constituent is valid there.
pub fn aggregate(pnls: &[&PnlSeries]) -> Result<PnlSeries> {
    let first = pnls.first().ok_or(Error::EmptyInput("no P&L series to aggregate"))?;
    let frequency = first.frequency;
    if pnls.iter().any(|p| p.frequency != frequency) {
        return Err(Error::config("cannot aggregate series of different frequencies"));
    }
    let mut by_label: BTreeMap<NaiveDate, PnlPoint> = BTreeMap::new();
    for series in pnls {
        for p in &series.points {
            let slot = by_label.entry(p.label).or_insert(PnlPoint {
                label: p.label,
                pnl: 0.0,
                valid: false,
                active: 0,
            });
            if p.valid {
                slot.pnl += p.pnl;
                slot.valid = true;
                slot.active += p.active.max(1);
            }
        }
    }
    Ok(PnlSeries {
        id: AGGREGATE_ID.to_string(),
        frequency,
        points: by_label.into_values().collect(),
    })
}

/// Trend and long-only legs of one instrument.
#[derive(Debug, Clone)]
pub struct InstrumentRun {
    pub id: String,
    pub sector: Sector,
    pub signals: SignalSeries,
    pub trend: PnlSeries,
    pub long: PnlSeries,
}

pub fn run_instrument(instrument: &Instrument, cfg: &TrendConfig) -> Result<InstrumentRun> {
    let signals = compute_signal(&instrument.series, cfg)?;
    let trend = instrument_pnl(&instrument.id, &instrument.series, &signals)?;
    let long = longonly_pnl(&instrument.id, &instrument.series, &signals)?;
    Ok(InstrumentRun {
        id: instrument.id.clone(),
        sector: instrument.sector,
        signals,
        trend,
        long,
    })
}

/// Backtest every instrument concurrently; results keep input order.
pub fn run_pool(instruments: &[Instrument], cfg: &TrendConfig) -> Result<Vec<InstrumentRun>> {
    instruments.par_iter().map(|i| run_instrument(i, cfg)).collect()
}
