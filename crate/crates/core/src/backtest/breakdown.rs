//! Sector, decade and 50-year breakdown tables.

use std::collections::BTreeSet;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::pnl::{aggregate, InstrumentRun, PnlSeries};
use super::stats::{debias, sharpe_and_tstat};
use crate::error::{Error, Result};
use crate::series::Sector;

/// First year of the first 50-year block.
pub const FIFTY_YEAR_ANCHOR: i32 = 1800;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    BySector,
    ByDecade,
    By50Years,
}

/// Statistics of one breakdown cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub sharpe: f64,
    pub tstat: f64,
    pub tstat_debiased: f64,
    pub drift_sharpe: f64,
    pub drift_tstat: f64,
    pub n_years: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub key: String,
    /// `None` when the group has fewer than the minimum valid periods.
    pub stats: Option<GroupStats>,
}

fn group_stats(trend: &PnlSeries, long: &PnlSeries) -> Result<Option<GroupStats>> {
    let t = match sharpe_and_tstat(trend) {
        Ok(t) => t,
        Err(Error::TooShort { .. } | Error::ZeroVariance) => return Ok(None),
        Err(e) => return Err(e),
    };
    let (drift_sharpe, drift_tstat) = match sharpe_and_tstat(long) {
        Ok(d) => (d.sharpe, d.tstat),
        Err(Error::TooShort { .. } | Error::ZeroVariance) => (f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let tstat_debiased = match debias(trend, long) {
        Ok(d) => d.tstat_debiased,
        Err(Error::TooShort { .. } | Error::ZeroVariance | Error::EmptyOverlap) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok(Some(GroupStats {
        sharpe: t.sharpe,
        tstat: t.tstat,
        tstat_debiased,
        drift_sharpe,
        drift_tstat,
        n_years: t.n_years,
    }))
}

fn decade_of(date: NaiveDate) -> i32 {
    date.year().div_euclid(10) * 10
}

fn block_of(date: NaiveDate) -> i32 {
    FIFTY_YEAR_ANCHOR + (date.year() - FIFTY_YEAR_ANCHOR).div_euclid(50) * 50
}

/// Break the pool's performance down by sector or by calendar block.
///
/// Sector rows aggregate the sector's instruments; time rows restrict the
/// pool aggregate to the block's periods. Row order: sector enum order, or
/// chronological.
pub fn breakdown(runs: &[InstrumentRun], grouping: Grouping) -> Result<Vec<BreakdownRow>> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("no instruments to break down"));
    }
    match grouping {
        Grouping::BySector => {
            let sectors: BTreeSet<Sector> = runs.iter().map(|r| r.sector).collect();
            sectors
                .into_iter()
                .map(|sector| {
                    let members: Vec<&InstrumentRun> = runs.iter().filter(|r| r.sector == sector).collect();
                    let trend = aggregate(&members.iter().map(|r| &r.trend).collect::<Vec<_>>())?;
                    let long = aggregate(&members.iter().map(|r| &r.long).collect::<Vec<_>>())?;
                    Ok(BreakdownRow {
                        key: sector.to_string(),
                        stats: group_stats(&trend, &long)?,
                    })
                })
                .collect()
        }
        Grouping::ByDecade | Grouping::By50Years => {
            let trend = aggregate(&runs.iter().map(|r| &r.trend).collect::<Vec<_>>())?;
            let long = aggregate(&runs.iter().map(|r| &r.long).collect::<Vec<_>>())?;
            let (key_of, width): (fn(NaiveDate) -> i32, i32) = match grouping {
                Grouping::ByDecade => (decade_of, 10),
                _ => (block_of, 50),
            };
            let keys: BTreeSet<i32> = trend
                .points
                .iter()
                .filter(|p| p.valid)
                .map(|p| key_of(p.label))
                .collect();
            keys.into_iter()
                .map(|k| {
                    let t = trend.restrict(|d| key_of(d) == k);
                    let l = long.restrict(|d| key_of(d) == k);
                    Ok(BreakdownRow {
                        key: format!("{}-{}", k, k + width),
                        stats: group_stats(&t, &l)?,
                    })
                })
                .collect()
        }
    }
}
