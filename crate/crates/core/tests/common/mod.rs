#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use trend_core::ingest::write_price_csv;
use trend_core::series::{calendar, Frequency, Period, PriceSeries};
use trend_core::signal::{SignalState, TrendConfig};

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(1900, 1, 31).unwrap()
}

/// Upward ramp with a small deterministic wobble so P&L has dispersion.
pub fn wobbly_ramp(n: usize) -> Vec<f64> {
    (0..n).map(|t| 100.0 + t as f64 + 0.3 * (t as f64).sin()).collect()
}

/// Prices whose σ-normalized next change is `response(s) + noise·z`.
pub fn planted_closes(n: usize, seed: u64, response: impl Fn(f64) -> f64, noise: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SignalState::new(TrendConfig::default()).unwrap();
    let labels = calendar(start(), n, Frequency::Monthly);
    let mut closes = vec![1000.0];
    let mut prev_vol = f64::NAN;
    for t in 0..n - 1 {
        let point = state.push(&Period::observed(labels[t], closes[t]));
        let z: f64 = StandardNormal.sample(&mut rng);
        let step = if point.valid {
            prev_vol * (response(point.signal) + noise * z)
        } else {
            noise * z
        };
        prev_vol = point.vol;
        closes.push(closes[t] + step);
    }
    closes
}

/// Write one CSV per instrument plus a manifest; returns the manifest path.
pub fn write_pool(dir: &Path, name: &str, instruments: &[(&str, &str, Vec<f64>)]) -> PathBuf {
    let mut manifest = String::from("base_frequency = \"monthly\"\n");
    for (i, (id, sector, closes)) in instruments.iter().enumerate() {
        let series = PriceSeries::from_closes(start(), closes, Frequency::Monthly).unwrap();
        let file = format!("{name}_{i}.csv");
        write_price_csv(&series, &dir.join(&file)).unwrap();
        manifest.push_str(&format!(
            "\n[[entries]]\nid = \"{id}\"\nsector = \"{sector}\"\npath = \"{file}\"\n"
        ));
    }
    let path = dir.join(format!("{name}.toml"));
    fs::write(&path, manifest).unwrap();
    path
}
