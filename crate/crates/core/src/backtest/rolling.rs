use super::pnl::PnlSeries;
use crate::error::{Error, Result};
use crate::series::{ReturnPoint, ReturnSeries};

/// Window length in periods for a window given in years.
pub fn window_periods(window_years: f64, periods_per_year: f64) -> usize {
    ((window_years * periods_per_year).round() as usize).max(1)
}

/// Trailing mean of valid P&L over the last `window_years`.
///
/// The value at index t averages the valid points among indices
/// `t - W + 1 ..= t`; points before the first full window are invalid.
pub fn rolling_pnl(pnl: &PnlSeries, window_years: f64) -> Result<ReturnSeries> {
    if !window_years.is_finite() || window_years <= 0.0 {
        return Err(Error::config(format!(
            "window_years must be positive, got {window_years}"
        )));
    }
    let w = window_periods(window_years, pnl.frequency.periods_per_year());
    let n = pnl.points.len();
    if w > n {
        return Err(Error::TooShort {
            needed: w,
            available: n,
        });
    }
    let mut sum = vec![0.0; n + 1];
    let mut count = vec![0usize; n + 1];
    for (i, p) in pnl.points.iter().enumerate() {
        sum[i + 1] = sum[i] + if p.valid { p.pnl } else { 0.0 };
        count[i + 1] = count[i] + usize::from(p.valid);
    }
    let points = pnl
        .points
        .iter()
        .enumerate()
        .map(|(t, p)| {
            let full = t + 1 >= w;
            let k = if full { count[t + 1] - count[t + 1 - w] } else { 0 };
            let valid = full && k > 0;
            ReturnPoint {
                label: p.label,
                value: if valid {
                    (sum[t + 1] - sum[t + 1 - w]) / k as f64
                } else {
                    0.0
                },
                valid,
            }
        })
        .collect();
    Ok(ReturnSeries {
        points,
        frequency: pnl.frequency,
    })
}
