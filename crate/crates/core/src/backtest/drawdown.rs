use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::pnl::PnlSeries;

/// One peak-to-recovery segment of the cumulative P&L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawdownRecord {
    /// Label of the peak period; the first period when the peak is the
    /// starting level before any P&L.
    pub start: NaiveDate,
    pub trough: NaiveDate,
    /// Label of the recovery period, `None` if never recovered.
    pub end: Option<NaiveDate>,
    /// Peak minus trough of the cumulative P&L.
    pub depth: f64,
    /// Peak to recovery, or peak to the last period if open.
    pub duration_years: f64,
    /// Same duration counted in periods.
    pub duration_periods: usize,
}

impl DrawdownRecord {
    pub fn is_open(&self) -> bool {
        self.end.is_none()
    }
}

/// Decompose the cumulative P&L into maximal drawdown segments.
///
/// The path starts at 0 before the first period. A drawdown starts when the
/// path falls below its running peak and ends at the first period where it
/// is back at or above that peak.
pub fn drawdowns(pnl: &PnlSeries) -> Vec<DrawdownRecord> {
    let cum = pnl.cumulative();
    let p = pnl.frequency.periods_per_year();
    let label = |i: isize| pnl.points[i.max(0) as usize].label;
    let mut out = Vec::new();
    let mut peak = 0.0_f64;
    let mut peak_idx: isize = -1;
    // (trough index, trough value) while underwater
    let mut under: Option<(isize, f64)> = None;
    for (i, &c) in cum.iter().enumerate() {
        let i = i as isize;
        match under {
            None if c < peak => under = Some((i, c)),
            None => {
                peak = c;
                peak_idx = i;
            }
            Some((ti, tv)) if c >= peak => {
                let periods = (i - peak_idx) as usize;
                out.push(DrawdownRecord {
                    start: label(peak_idx),
                    trough: label(ti),
                    end: Some(label(i)),
                    depth: peak - tv,
                    duration_years: periods as f64 / p,
                    duration_periods: periods,
                });
                under = None;
                peak = c;
                peak_idx = i;
            }
            Some((_, tv)) if c < tv => under = Some((i, c)),
            Some(_) => {}
        }
    }
    if let Some((ti, tv)) = under {
        let periods = (cum.len() as isize - 1 - peak_idx) as usize;
        out.push(DrawdownRecord {
            start: label(peak_idx),
            trough: label(ti),
            end: None,
            depth: peak - tv,
            duration_years: periods as f64 / p,
            duration_periods: periods,
        });
    }
    out
}
