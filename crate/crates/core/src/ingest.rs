//! Instrument manifests, price files, transforms, calendar alignment and
//! exclusion windows.
//!
//! A manifest is a TOML document:
//!
//! ```toml
//! base_frequency = "monthly"          # or "daily"
//!
//! [[entries]]
//! id = "us_10y"
//! sector = "bond"                     # currency | commodity | bond | index
//! path = "data/us_10y.csv"            # relative to the manifest's directory
//! transform = "yield_to_price"        # or "none" (default)
//! duration_years = 10.0               # yield_to_price only, default 10
//! start = "1918-01-01"                # optional
//! exclusions = [["1941-12-01", "1951-12-31"]]
//! ```
//!
//! Price files are UTF-8 CSV with a `date,close` header and ISO-8601 dates.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::series::{month_end_of, Frequency, Instrument, Period, PriceSeries, Sector};

/// Default bond duration for the yield-to-price transform.
pub const DEFAULT_DURATION_YEARS: f64 = 10.0;

/// Starting level of a synthetic price built from yields.
const YIELD_PRICE_BASE: f64 = 100.0;

/// Closed date interval during which an instrument is forced flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exclusion {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Exclusion {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

/// Transform applied to raw values before they are treated as prices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Transform {
    #[default]
    None,
    /// Values are yields in percent per annum; build a constant-duration price.
    YieldToPrice { duration_years: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub sector: Sector,
    /// Resolved path of the price file.
    pub path: PathBuf,
    pub transform: Transform,
    pub start: Option<NaiveDate>,
    /// Sorted, non-overlapping.
    pub exclusions: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentManifest {
    pub entries: Vec<ManifestEntry>,
    pub base_frequency: Frequency,
}

/// Raw `(date, value)` observations, dates strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub observations: Vec<(NaiveDate, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    #[serde(default = "default_frequency")]
    base_frequency: Frequency,
    #[serde(default)]
    entries: Vec<EntryFile>,
}

fn default_frequency() -> Frequency {
    Frequency::Monthly
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    id: String,
    sector: Sector,
    path: PathBuf,
    #[serde(default)]
    transform: TransformKind,
    duration_years: Option<f64>,
    start: Option<DateRepr>,
    #[serde(default)]
    exclusions: Vec<[DateRepr; 2]>,
}

#[derive(Deserialize, Default, PartialEq)]
#[serde(rename_all = "snake_case")]
enum TransformKind {
    #[default]
    None,
    YieldToPrice,
}

/// Dates may be written as TOML dates or as quoted ISO strings.
#[derive(Deserialize)]
#[serde(untagged)]
enum DateRepr {
    Toml(toml::value::Datetime),
    Text(String),
}

impl DateRepr {
    fn resolve(&self, entry: &str, field: &'static str) -> Result<NaiveDate> {
        let text = match self {
            DateRepr::Toml(dt) => match (dt.date, dt.time) {
                (Some(_), None) => dt.to_string(),
                _ => {
                    return Err(invalid(entry, field, format!("expected a plain date, got {dt}")));
                }
            },
            DateRepr::Text(s) => s.clone(),
        };
        NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d")
            .map_err(|e| invalid(entry, field, format!("\"{text}\": {e}")))
    }
}

fn invalid(entry: &str, field: &'static str, message: String) -> Error {
    Error::InvalidField {
        entry: Some(entry.to_string()),
        field,
        message,
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse and validate a manifest; relative price paths resolve against the
/// manifest's directory and must exist.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<InstrumentManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let file: ManifestFile = toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.span().map(|s| line_of(&text, s.start)),
        message: e.message().to_string(),
    })?;
    let manifest = validate_manifest(file, base_dir)?;
    for entry in &manifest.entries {
        if !entry.path.is_file() {
            return Err(Error::MissingFile(entry.path.clone()));
        }
    }
    Ok(manifest)
}

fn validate_manifest(file: ManifestFile, base_dir: &Path) -> Result<InstrumentManifest> {
    if file.entries.is_empty() {
        return Err(Error::EmptyManifest);
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(file.entries.len());
    for raw in file.entries {
        let id = raw.id.trim().to_string();
        if id.is_empty() {
            return Err(Error::InvalidField {
                entry: None,
                field: "id",
                message: "must be non-empty".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let transform = match (raw.transform, raw.duration_years) {
            (TransformKind::None, None) => Transform::None,
            (TransformKind::None, Some(_)) => {
                return Err(invalid(
                    &id,
                    "duration_years",
                    "only applies to transform = \"yield_to_price\"".into(),
                ));
            }
            (TransformKind::YieldToPrice, d) => {
                let duration_years = d.unwrap_or(DEFAULT_DURATION_YEARS);
                if !(duration_years.is_finite() && duration_years > 0.0) {
                    return Err(invalid(&id, "duration_years", "must be positive".into()));
                }
                Transform::YieldToPrice { duration_years }
            }
        };
        let start = raw.start.as_ref().map(|d| d.resolve(&id, "start")).transpose()?;
        let mut exclusions = raw
            .exclusions
            .iter()
            .map(|[a, b]| {
                let (start, end) = (a.resolve(&id, "exclusions")?, b.resolve(&id, "exclusions")?);
                if end < start {
                    return Err(invalid(
                        &id,
                        "exclusions",
                        format!("interval ends ({end}) before it starts ({start})"),
                    ));
                }
                Ok(Exclusion { start, end })
            })
            .collect::<Result<Vec<_>>>()?;
        exclusions.sort_by_key(|e| e.start);
        for pair in exclusions.windows(2) {
            if pair[1].start <= pair[0].end {
                return Err(Error::OverlappingExclusions {
                    id,
                    first_end: pair[0].end,
                    second_start: pair[1].start,
                });
            }
        }
        let path = if raw.path.is_absolute() {
            raw.path
        } else {
            base_dir.join(raw.path)
        };
        entries.push(ManifestEntry {
            id,
            sector: raw.sector,
            path,
            transform,
            start,
            exclusions,
        });
    }
    Ok(InstrumentManifest {
        entries,
        base_frequency: file.base_frequency,
    })
}

/// Read a `date,close` CSV file.
pub fn load_series(entry: &ManifestEntry) -> Result<RawSeries> {
    read_price_csv(&entry.path)
}

pub fn read_price_csv(path: &Path) -> Result<RawSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "close" {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: Some(1),
            message: format!(
                "expected header `date,close`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut observations: Vec<(NaiveDate, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: Some(line),
            message,
        };
        if record.len() != 2 {
            return Err(parse_err(format!("expected 2 fields, found {}", record.len())));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| parse_err(format!("bad date \"{}\": {e}", &record[0])))?;
        let value: f64 = record[1]
            .parse()
            .map_err(|e| parse_err(format!("bad close \"{}\": {e}", &record[1])))?;
        if !value.is_finite() {
            return Err(Error::NonFiniteValue { line });
        }
        if let Some(&(last, _)) = observations.last() {
            if date == last {
                return Err(Error::DuplicateDate { line, date });
            }
            if date < last {
                return Err(Error::NonMonotoneDates { line, date });
            }
        }
        observations.push((date, value));
    }
    if observations.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    Ok(RawSeries { observations })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => {
            if io.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile(path.to_path_buf())
            } else {
                Error::io(path, io)
            }
        }
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Turn raw values into a price series on the observation dates.
///
/// The result is tagged [`Frequency::Daily`] (one period per observation);
/// [`align_to_calendar`] maps it onto the run frequency.
pub fn apply_transform(raw: &RawSeries, transform: Transform) -> Result<PriceSeries> {
    let periods: Vec<Period> = match transform {
        Transform::None => raw
            .observations
            .iter()
            .map(|&(date, value)| {
                if value > 0.0 {
                    Ok(Period::observed(date, value))
                } else {
                    Err(Error::NonPositivePrice { date, value })
                }
            })
            .collect::<Result<_>>()?,
        Transform::YieldToPrice { duration_years } => {
            let mut out = Vec::with_capacity(raw.observations.len());
            let mut price = YIELD_PRICE_BASE;
            let mut prev_yield: Option<f64> = None;
            for &(date, y) in &raw.observations {
                if let Some(prev) = prev_yield {
                    let factor = 1.0 - duration_years * (y - prev) / 100.0;
                    price *= factor;
                    if !(factor > 0.0 && price > 0.0) {
                        return Err(Error::NonPositivePrice { date, value: price });
                    }
                }
                prev_yield = Some(y);
                out.push(Period::observed(date, price));
            }
            out
        }
    };
    PriceSeries::new(periods, Frequency::Daily)
}

/// One observation per calendar period; periods without data become
/// explicit absent periods (never forward-filled).
pub fn align_to_calendar(series: &PriceSeries, frequency: Frequency) -> PriceSeries {
    match frequency {
        Frequency::Daily => PriceSeries::new(series.periods().to_vec(), Frequency::Daily).expect("already validated"),
        Frequency::Monthly => {
            let mut by_month: BTreeMap<NaiveDate, Period> = BTreeMap::new();
            for p in series.periods().iter().filter(|p| p.close.is_some()) {
                let label = month_end_of(p.label);
                // later rows overwrite earlier ones: last close of the month wins
                by_month.insert(label, Period { label, ..*p });
            }
            let (Some(&first), Some(&last)) = (by_month.keys().next(), by_month.keys().next_back()) else {
                return PriceSeries::new(Vec::new(), Frequency::Monthly).expect("empty is valid");
            };
            let mut periods = Vec::with_capacity(by_month.len());
            let mut month = first;
            while month <= last {
                periods.push(by_month.get(&month).copied().unwrap_or(Period::absent(month)));
                let next = month.succ_opt().expect("date in range");
                month = month_end_of(next);
            }
            PriceSeries::new(periods, Frequency::Monthly).expect("labels increasing")
        }
    }
}

/// Mark every period whose label falls in an exclusion interval.
pub fn apply_exclusions(series: &PriceSeries, exclusions: &[Exclusion]) -> PriceSeries {
    let periods = series
        .periods()
        .iter()
        .map(|p| Period {
            excluded: p.excluded || exclusions.iter().any(|e| e.contains(p.label)),
            ..*p
        })
        .collect();
    PriceSeries::new(periods, series.frequency()).expect("labels unchanged")
}

/// Drop periods labeled before `start`.
pub fn trim_start(series: &PriceSeries, start: NaiveDate) -> PriceSeries {
    let periods = series
        .periods()
        .iter()
        .filter(|p| {
            p.label >= start
                || (series.frequency() == Frequency::Monthly
                    && p.label.year() == start.year()
                    && p.label.month() == start.month())
        })
        .copied()
        .collect();
    PriceSeries::new(periods, series.frequency()).expect("subset of valid series")
}

/// Full per-entry pipeline: read, transform, align, trim, exclude.
pub fn load_instrument(entry: &ManifestEntry, frequency: Frequency) -> Result<Instrument> {
    let raw = load_series(entry)?;
    let priced = apply_transform(&raw, entry.transform)?;
    let mut series = align_to_calendar(&priced, frequency);
    if let Some(start) = entry.start {
        series = trim_start(&series, start);
    }
    let series = apply_exclusions(&series, &entry.exclusions);
    Ok(Instrument {
        id: entry.id.clone(),
        sector: entry.sector,
        series,
    })
}

/// Load every instrument of a manifest concurrently; output keeps manifest order.
pub fn load_pool(manifest: &InstrumentManifest) -> Result<Vec<Instrument>> {
    manifest
        .entries
        .par_iter()
        .map(|entry| load_instrument(entry, manifest.base_frequency))
        .collect()
}

/// Write present closes as a `date,close` CSV (absent periods are omitted).
pub fn write_price_csv(series: &PriceSeries, path: &Path) -> Result<()> {
    let mut out = String::from("date,close\n");
    for p in series.periods() {
        if let Some(close) = p.close {
            out.push_str(&format!("{},{}\n", p.label, close));
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn entry(path: PathBuf) -> ManifestEntry {
        ManifestEntry {
            id: "x".into(),
            sector: Sector::Commodity,
            path,
            transform: Transform::None,
            start: None,
            exclusions: vec![],
        }
    }

    #[test]
    fn empty_manifest_is_rejected() {
        let dir = TempDir::new().unwrap();
        let m = write(&dir, "m.toml", "base_frequency = \"monthly\"\n");
        assert_eq!(load_manifest(&m).unwrap_err().to_string(), "empty manifest");
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let dir = TempDir::new().unwrap();
        write(&dir, "w.csv", "date,close\n2000-01-31,1\n");
        let m = write(
            &dir,
            "m.toml",
            r#"
[[entries]]
id = "wheat"
sector = "commodity"
path = "w.csv"

[[entries]]
id = "wheat"
sector = "commodity"
path = "w.csv"
"#,
        );
        let err = load_manifest(&m).unwrap_err();
        assert!(err.to_string().contains("duplicate id"), "{err}");
    }

    #[test]
    fn overlapping_exclusions_are_rejected() {
        let dir = TempDir::new().unwrap();
        write(&dir, "w.csv", "date,close\n2000-01-31,1\n");
        let m = write(
            &dir,
            "m.toml",
            r#"
[[entries]]
id = "wheat"
sector = "commodity"
path = "w.csv"
exclusions = [["1940-01-01", "1945-12-31"], [1945-06-01, 1950-01-01]]
"#,
        );
        assert!(matches!(load_manifest(&m), Err(Error::OverlappingExclusions { .. })));
    }

    #[test]
    fn missing_price_file_is_reported() {
        let dir = TempDir::new().unwrap();
        let m = write(
            &dir,
            "m.toml",
            "[[entries]]\nid = \"a\"\nsector = \"bond\"\npath = \"nope.csv\"\n",
        );
        let err = load_manifest(&m).unwrap_err();
        assert!(matches!(err, Error::MissingFile(_)));
        assert_eq!(err.exit_code(), crate::error::EXIT_IO);
    }

    #[test]
    fn parse_errors_carry_a_line() {
        let dir = TempDir::new().unwrap();
        let m = write(
            &dir,
            "m.toml",
            "base_frequency = \"monthly\"\n\n[[entries]]\nid = \"a\"\nsector = \"metal\"\npath = \"a.csv\"\n",
        );
        match load_manifest(&m).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, Some(5)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn yield_entries_default_to_ten_year_duration() {
        let dir = TempDir::new().unwrap();
        write(&dir, "b.csv", "date,close\n2000-01-31,5\n");
        let m = write(
            &dir,
            "m.toml",
            "[[entries]]\nid = \"b\"\nsector = \"bond\"\npath = \"b.csv\"\ntransform = \"yield_to_price\"\nstart = 1918-01-01\n",
        );
        let manifest = load_manifest(&m).unwrap();
        assert_eq!(
            manifest.entries[0].transform,
            Transform::YieldToPrice { duration_years: 10.0 }
        );
        assert_eq!(manifest.entries[0].start, Some(d(1918, 1, 1)));
    }

    #[test]
    fn two_row_file_loads() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.csv", "date,close\n2000-01-31,100\n2000-02-29,101\n");
        let raw = load_series(&entry(p)).unwrap();
        assert_eq!(raw.observations, vec![(d(2000, 1, 31), 100.0), (d(2000, 2, 29), 101.0)]);
    }

    #[test]
    fn duplicate_date_rows_fail() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.csv", "date,close\n2000-01-31,100\n2000-01-31,101\n");
        let err = load_series(&entry(p)).unwrap_err();
        assert!(err.to_string().contains("duplicate date"), "{err}");
    }

    #[test]
    fn nan_values_fail() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.csv", "date,close\n2000-01-31,NaN\n");
        let err = load_series(&entry(p)).unwrap_err();
        assert!(err.to_string().contains("non-finite value"), "{err}");
    }

    #[test]
    fn decreasing_dates_fail() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.csv", "date,close\n2000-02-29,100\n2000-01-31,101\n");
        assert!(matches!(
            load_series(&entry(p)),
            Err(Error::NonMonotoneDates { line: 3, .. })
        ));
    }

    #[test]
    fn header_only_file_is_empty() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.csv", "date,close\n");
        assert!(matches!(load_series(&entry(p)), Err(Error::EmptyFile(_))));
    }

    fn raw(values: &[f64]) -> RawSeries {
        RawSeries {
            observations: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (d(2000, 1, 1) + chrono::Days::new(i as u64 * 31), v))
                .collect(),
        }
    }

    fn closes(s: &PriceSeries) -> Vec<f64> {
        s.periods().iter().map(|p| p.close.unwrap()).collect()
    }

    #[test]
    fn identity_transform_passes_values() {
        assert_eq!(
            closes(&apply_transform(&raw(&[100.0, 101.0]), Transform::None).unwrap()),
            vec![100.0, 101.0]
        );
    }

    #[test]
    fn identity_transform_rejects_non_positive() {
        assert!(matches!(
            apply_transform(&raw(&[100.0, -1.0]), Transform::None),
            Err(Error::NonPositivePrice { .. })
        ));
    }

    #[test]
    fn unchanged_yield_keeps_price() {
        let t = Transform::YieldToPrice { duration_years: 10.0 };
        assert_eq!(
            closes(&apply_transform(&raw(&[5.0, 5.0]), t).unwrap()),
            vec![100.0, 100.0]
        );
    }

    #[test]
    fn falling_yield_raises_price() {
        let t = Transform::YieldToPrice { duration_years: 10.0 };
        let c = closes(&apply_transform(&raw(&[5.00, 4.90]), t).unwrap());
        assert_eq!(c[0], 100.0);
        // 100 * (1 - 10 * (-0.10) / 100) = 101
        assert!((c[1] - 101.0).abs() < 1e-12, "{}", c[1]);
    }

    #[test]
    fn yield_jump_that_wipes_out_price_fails() {
        let t = Transform::YieldToPrice { duration_years: 10.0 };
        assert!(matches!(
            apply_transform(&raw(&[5.0, 15.0]), t),
            Err(Error::NonPositivePrice { .. })
        ));
    }

    fn daily(rows: &[(NaiveDate, f64)]) -> PriceSeries {
        PriceSeries::new(
            rows.iter().map(|&(l, c)| Period::observed(l, c)).collect(),
            Frequency::Daily,
        )
        .unwrap()
    }

    #[test]
    fn month_end_series_is_unchanged_by_monthly_alignment() {
        let s = PriceSeries::from_closes(d(2000, 1, 1), &[1.0, 2.0, 3.0], Frequency::Monthly).unwrap();
        assert_eq!(align_to_calendar(&s, Frequency::Monthly), s);
    }

    #[test]
    fn daily_rows_collapse_to_last_close_of_month() {
        let s = daily(&[
            (d(2001, 1, 3), 10.0),
            (d(2001, 1, 17), 11.0),
            (d(2001, 1, 30), 12.0),
            (d(2001, 2, 1), 20.0),
            (d(2001, 2, 27), 21.0),
            (d(2001, 3, 15), 30.0),
        ]);
        let m = align_to_calendar(&s, Frequency::Monthly);
        let got: Vec<(NaiveDate, f64)> = m.periods().iter().map(|p| (p.label, p.close.unwrap())).collect();
        assert_eq!(
            got,
            vec![(d(2001, 1, 31), 12.0), (d(2001, 2, 28), 21.0), (d(2001, 3, 31), 30.0)]
        );
    }

    #[test]
    fn gap_months_are_explicitly_absent() {
        let s = daily(&[(d(2001, 1, 31), 1.0), (d(2001, 4, 30), 2.0)]);
        let m = align_to_calendar(&s, Frequency::Monthly);
        assert_eq!(m.len(), 4);
        assert_eq!(m.periods()[1], Period::absent(d(2001, 2, 28)));
        assert_eq!(m.periods()[2], Period::absent(d(2001, 3, 31)));
    }

    fn twelve_months() -> PriceSeries {
        PriceSeries::from_closes(d(2000, 1, 1), &[1.0; 12], Frequency::Monthly).unwrap()
    }

    #[test]
    fn no_exclusions_is_identity() {
        assert_eq!(apply_exclusions(&twelve_months(), &[]), twelve_months());
    }

    #[test]
    fn exclusion_covering_everything() {
        let e = Exclusion {
            start: d(1990, 1, 1),
            end: d(2010, 1, 1),
        };
        assert!(apply_exclusions(&twelve_months(), &[e])
            .periods()
            .iter()
            .all(|p| p.excluded));
    }

    #[test]
    fn exclusion_of_months_five_to_eight() {
        let e = Exclusion {
            start: d(2000, 5, 1),
            end: d(2000, 8, 31),
        };
        let s = apply_exclusions(&twelve_months(), &[e]);
        let flags: Vec<bool> = s.periods().iter().map(|p| p.excluded).collect();
        assert_eq!(flags.iter().filter(|&&x| x).count(), 4);
        assert!(flags[4..8].iter().all(|&x| x));
    }

    #[test]
    fn trim_keeps_start_month() {
        let s = trim_start(&twelve_months(), d(2000, 3, 15));
        assert_eq!(s.periods()[0].label, d(2000, 3, 31));
        assert_eq!(s.len(), 10);
    }
}
