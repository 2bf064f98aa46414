//! Canonical time-series containers and return computations.
//!
//! A [`PriceSeries`] is an ordered list of periods. Each period carries a
//! canonical label (month-end date for monthly data, the trading date for
//! daily data), an optional close and an exclusion flag. A period is
//! *usable* when its close is present and it is not excluded; everything
//! downstream keys its validity masks off that notion.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Months, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    #[default]
    Monthly,
    Daily,
}

impl Frequency {
    /// Periods per year used for annualization.
    pub fn periods_per_year(self) -> f64 {
        match self {
            Frequency::Monthly => 12.0,
            Frequency::Daily => 252.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Frequency::Monthly => "monthly",
            Frequency::Daily => "daily",
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monthly" => Ok(Frequency::Monthly),
            "daily" => Ok(Frequency::Daily),
            other => Err(Error::config(format!("unknown frequency \"{other}\""))),
        }
    }
}

/// Asset class of an instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Currency,
    Commodity,
    Bond,
    Index,
}

impl Sector {
    pub const ALL: [Sector; 4] = [Sector::Currency, Sector::Commodity, Sector::Bond, Sector::Index];

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Currency => "currency",
            Sector::Commodity => "commodity",
            Sector::Bond => "bond",
            Sector::Index => "index",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sector::ALL
            .into_iter()
            .find(|sector| sector.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown sector \"{s}\"")))
    }
}

/// Last calendar day of the given month.
pub fn month_end(year: i32, month: u32) -> NaiveDate {
    let first = NaiveDate::from_ymd_opt(year, month, 1).expect("valid year/month");
    first + Months::new(1) - chrono::Days::new(1)
}

/// Canonical month-end label of the month containing `date`.
pub fn month_end_of(date: NaiveDate) -> NaiveDate {
    month_end(date.year(), date.month())
}

/// `count` consecutive period labels starting at the period containing `start`.
///
/// Monthly labels are month-ends; daily labels are weekdays.
pub fn calendar(start: NaiveDate, count: usize, frequency: Frequency) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    match frequency {
        Frequency::Monthly => {
            let mut first = NaiveDate::from_ymd_opt(start.year(), start.month(), 1).expect("valid start month");
            for _ in 0..count {
                out.push(month_end_of(first));
                first = first + Months::new(1);
            }
        }
        Frequency::Daily => {
            let mut day = start;
            while out.len() < count {
                if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
                    out.push(day);
                }
                day = day.succ_opt().expect("date in range");
            }
        }
    }
    out
}

/// One period of a price series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub label: NaiveDate,
    /// `None` marks an absent period (no observation in that calendar slot).
    pub close: Option<f64>,
    pub excluded: bool,
}

impl Period {
    pub fn observed(label: NaiveDate, close: f64) -> Self {
        Period {
            label,
            close: Some(close),
            excluded: false,
        }
    }

    pub fn absent(label: NaiveDate) -> Self {
        Period {
            label,
            close: None,
            excluded: false,
        }
    }

    /// Close of a present, non-excluded period.
    #[inline]
    pub fn usable(&self) -> Option<f64> {
        if self.excluded {
            None
        } else {
            self.close
        }
    }
}

/// Ordered positive closes at a fixed frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    periods: Vec<Period>,
    frequency: Frequency,
}

impl PriceSeries {
    /// Build a series, checking label order and close positivity.
    pub fn new(periods: Vec<Period>, frequency: Frequency) -> Result<Self> {
        for pair in periods.windows(2) {
            if pair[1].label <= pair[0].label {
                return Err(Error::InvalidField {
                    entry: None,
                    field: "period",
                    message: format!(
                        "labels must be strictly increasing ({} then {})",
                        pair[0].label, pair[1].label
                    ),
                });
            }
        }
        for p in &periods {
            if let Some(close) = p.close {
                if !(close.is_finite() && close > 0.0) {
                    return Err(Error::NonPositivePrice {
                        date: p.label,
                        value: close,
                    });
                }
            }
        }
        Ok(PriceSeries { periods, frequency })
    }

    /// Consecutive closes on the canonical calendar starting at `start`.
    pub fn from_closes(start: NaiveDate, closes: &[f64], frequency: Frequency) -> Result<Self> {
        let labels = calendar(start, closes.len(), frequency);
        let periods = labels
            .into_iter()
            .zip(closes)
            .map(|(label, &close)| Period::observed(label, close))
            .collect();
        PriceSeries::new(periods, frequency)
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    /// Give back the periods, e.g. to edit them and rebuild with `new`.
    pub fn into_parts(self) -> (Vec<Period>, Frequency) {
        (self.periods, self.frequency)
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Close of period `index` if present and not excluded.
    #[inline]
    pub fn usable(&self, index: usize) -> Option<f64> {
        self.periods.get(index).and_then(Period::usable)
    }

    pub fn usable_count(&self) -> usize {
        self.periods.iter().filter(|p| p.usable().is_some()).count()
    }

    /// Apply `f` to every present close, keeping labels and flags.
    pub fn map_closes(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let periods = self
            .periods
            .iter()
            .map(|p| Period {
                close: p.close.map(&f),
                ..*p
            })
            .collect();
        PriceSeries::new(periods, self.frequency)
    }
}

/// A priced instrument of the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    pub id: String,
    pub sector: Sector,
    pub series: PriceSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnPoint {
    pub label: NaiveDate,
    pub value: f64,
    pub valid: bool,
}

/// Per-period values with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub points: Vec<ReturnPoint>,
    pub frequency: Frequency,
}

impl ReturnSeries {
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().filter(|p| p.valid).map(|p| p.value)
    }
}

/// Absolute price changes `p(t) - p(t-1)`, labeled by `t`.
///
/// A change is invalid when either endpoint is absent or excluded, so an
/// excluded period poisons the change into it and the change out of it.
pub fn price_changes(series: &PriceSeries) -> Result<ReturnSeries> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            available: series.len(),
        });
    }
    let points = series
        .periods()
        .windows(2)
        .map(|w| match (w[0].usable(), w[1].usable()) {
            (Some(prev), Some(cur)) => ReturnPoint {
                label: w[1].label,
                value: cur - prev,
                valid: true,
            },
            _ => ReturnPoint {
                label: w[1].label,
                value: 0.0,
                valid: false,
            },
        })
        .collect();
    Ok(ReturnSeries {
        points,
        frequency: series.frequency(),
    })
}

/// One aligned pair from [`overlap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paired {
    pub label: NaiveDate,
    pub a: f64,
    pub b: f64,
}

/// Pair up the periods at which both series are valid.
pub fn overlap(a: &ReturnSeries, b: &ReturnSeries) -> Result<Vec<Paired>> {
    let pairs = overlap_points(&a.points, &b.points);
    if pairs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    Ok(pairs)
}

/// Merge-join two label-sorted point lists on label, keeping pairs valid on both sides.
pub(crate) fn overlap_points(a: &[ReturnPoint], b: &[ReturnPoint]) -> Vec<Paired> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].label.cmp(&b[j].label) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i].valid && b[j].valid {
                    out.push(Paired {
                        label: a[i].label,
                        a: a[i].value,
                        b: b[j].value,
                    });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}
