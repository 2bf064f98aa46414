//! Invariant checks shared by the property tests and the acceptance harness.
#![allow(dead_code)]

use chrono::NaiveDate;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use trend_core::backtest::{aggregate, debias, instrument_pnl, PnlPoint, PnlSeries};
use trend_core::series::{calendar, price_changes, Frequency, Period, PriceSeries};
use trend_core::signal::{compute_signal, SignalPoint, SignalSeries, SignalState, TrendConfig};

pub type Check = Result<(), TestCaseError>;

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(1900, 1, 31).unwrap()
}

/// Paths around 300 that stay inside (0, 600).
pub fn closes_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 30..160).prop_map(|steps| {
        let mut p = 300.0;
        let mut out = vec![p];
        for s in steps {
            p += s;
            out.push(p);
        }
        out
    })
}

/// Same, with some periods excluded or absent.
pub fn gappy_series() -> impl Strategy<Value = PriceSeries> {
    (closes_strategy(), prop::collection::vec(0u8..20, 160)).prop_map(|(closes, flags)| {
        let labels = calendar(start(), closes.len(), Frequency::Monthly);
        let periods = labels
            .into_iter()
            .zip(&closes)
            .zip(&flags)
            .map(|((label, &c), &f)| match f {
                0 => Period::absent(label),
                1 => Period {
                    excluded: true,
                    ..Period::observed(label, c)
                },
                _ => Period::observed(label, c),
            })
            .collect();
        PriceSeries::new(periods, Frequency::Monthly).unwrap()
    })
}

pub fn series(closes: &[f64]) -> PriceSeries {
    PriceSeries::from_closes(start(), closes, Frequency::Monthly).unwrap()
}

pub fn signals(s: &PriceSeries) -> SignalSeries {
    compute_signal(s, &TrendConfig::default()).unwrap()
}

pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn pnl_of(values: &[f64]) -> PnlSeries {
    PnlSeries {
        id: "x".into(),
        frequency: Frequency::Monthly,
        points: calendar(start(), values.len(), Frequency::Monthly)
            .into_iter()
            .zip(values)
            .map(|(label, &pnl)| PnlPoint {
                label,
                pnl,
                valid: true,
                active: 1,
            })
            .collect(),
    }
}

pub fn scale_inputs() -> impl Strategy<Value = (Vec<f64>, i32, f64)> {
    (closes_strategy(), -4i32..6, 0.01..100.0f64)
}

/// Power-of-two scalings are bit-exact; arbitrary ones agree to 1e-9.
pub fn signal_scale_invariance((closes, k, lambda): (Vec<f64>, i32, f64)) -> Check {
    let base = signals(&series(&closes));
    let pow2 = 2f64.powi(k);
    let exact = signals(&series(&closes.iter().map(|c| c * pow2).collect::<Vec<_>>()));
    let scaled = signals(&series(&closes.iter().map(|c| c * lambda).collect::<Vec<_>>()));
    for t in 0..base.len() {
        prop_assert_eq!(base.points[t].valid, exact.points[t].valid);
        prop_assert_eq!(base.points[t].signal.to_bits(), exact.points[t].signal.to_bits());
        prop_assert_eq!(base.points[t].valid, scaled.points[t].valid);
        prop_assert!(close_rel(base.points[t].signal, scaled.points[t].signal, 1e-9));
    }
    Ok(())
}

pub fn pnl_scale_invariance((closes, k, lambda): (Vec<f64>, i32, f64)) -> Check {
    let a = series(&closes);
    let pa = instrument_pnl("a", &a, &signals(&a)).unwrap();
    for (factor, tol) in [(2f64.powi(k), 0.0), (lambda, 1e-9)] {
        let b = series(&closes.iter().map(|c| c * factor).collect::<Vec<_>>());
        let pb = instrument_pnl("b", &b, &signals(&b)).unwrap();
        for (x, y) in pa.points.iter().zip(&pb.points) {
            prop_assert_eq!(x.valid, y.valid);
            prop_assert!(
                (x.pnl - y.pnl).abs() <= tol * x.pnl.abs().max(1.0),
                "{} vs {}",
                x.pnl,
                y.pnl
            );
        }
    }
    Ok(())
}

pub fn translation_inputs() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (closes_strategy(), -200.0..200.0f64)
}

pub fn translation_covariance((closes, c): (Vec<f64>, f64)) -> Check {
    let base = signals(&series(&closes));
    let moved = signals(&series(&closes.iter().map(|p| p + c).collect::<Vec<_>>()));
    for (a, b) in base.points.iter().zip(&moved.points) {
        prop_assert_eq!(a.valid, b.valid);
        prop_assert!(close_rel(a.signal, b.signal, 1e-8));
        if a.vol.is_finite() {
            prop_assert!((a.vol - b.vol).abs() <= 1e-9 * a.vol.max(1e-3));
        }
        if a.ref_price.is_finite() {
            prop_assert!(close_rel(a.ref_price + c, b.ref_price, 1e-12));
        }
    }
    Ok(())
}

/// p → 2p(0) − p. Exact up to the rounding of the mirrored EMAs.
pub fn reversal_antisymmetry(closes: Vec<f64>) -> Check {
    let p0 = closes[0];
    let base = signals(&series(&closes));
    let mirrored = signals(&series(&closes.iter().map(|p| 2.0 * p0 - p).collect::<Vec<_>>()));
    for (a, b) in base.points.iter().zip(&mirrored.points) {
        prop_assert_eq!(a.valid, b.valid);
        prop_assert!(close_rel(a.signal, -b.signal, 1e-8), "{} vs {}", a.signal, b.signal);
    }
    Ok(())
}

pub fn streaming_equals_batch(s: PriceSeries) -> Check {
    let cfg = TrendConfig::default();
    let mut state = SignalState::new(cfg).unwrap();
    let streamed: Vec<SignalPoint> = s.periods().iter().map(|p| state.push(p)).collect();
    match compute_signal(&s, &cfg) {
        Ok(batch) => {
            for (a, b) in streamed.iter().zip(&batch.points) {
                prop_assert_eq!(a.valid, b.valid);
                prop_assert_eq!(a.signal.to_bits(), b.signal.to_bits());
                prop_assert_eq!(a.vol.to_bits(), b.vol.to_bits());
                prop_assert_eq!(a.ref_price.to_bits(), b.ref_price.to_bits());
            }
        }
        Err(_) => prop_assert!(streamed.iter().all(|p| !p.valid)),
    }
    Ok(())
}

pub fn debias_inputs() -> impl Strategy<Value = (Vec<(f64, f64)>, f64)> {
    (
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 24..300),
        -2.0..2.0f64,
    )
}

pub fn debias_orthogonality((pairs, beta): (Vec<(f64, f64)>, f64)) -> Check {
    let q: Vec<f64> = pairs.iter().map(|(e, l)| e + beta * l).collect();
    let l: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let Ok(d) = debias(&pnl_of(&q), &pnl_of(&l)) else {
        return Ok(());
    };
    let r = d.residual.valid_values();
    let dot: f64 = r.iter().zip(&l).map(|(r, l)| r * l).sum();
    let scale = r.iter().map(|x| x * x).sum::<f64>().sqrt() * l.iter().map(|x| x * x).sum::<f64>().sqrt();
    prop_assert!(dot.abs() <= 1e-9 * scale.max(1e-300), "{dot} vs {scale}");
    Ok(())
}

pub fn pool_inputs() -> impl Strategy<Value = Vec<PriceSeries>> {
    prop::collection::vec(gappy_series(), 1..5)
}

/// Aggregate equals the plain per-label sum, bit for bit.
pub fn aggregate_linearity(paths: Vec<PriceSeries>) -> Check {
    let pnls: Vec<PnlSeries> = paths
        .iter()
        .filter_map(|s| {
            compute_signal(s, &TrendConfig::default())
                .ok()
                .map(|sig| instrument_pnl("x", s, &sig).unwrap())
        })
        .collect();
    if pnls.is_empty() {
        return Ok(());
    }
    let agg = aggregate(&pnls.iter().collect::<Vec<_>>()).unwrap();
    for p in &agg.points {
        let mut sum = 0.0;
        let mut active = 0;
        for q in pnls
            .iter()
            .flat_map(|s| s.points.iter().filter(|q| q.label == p.label && q.valid))
        {
            sum += q.pnl;
            active += 1;
        }
        prop_assert_eq!(p.pnl, sum);
        prop_assert_eq!(p.active, active);
        prop_assert_eq!(p.valid, active > 0);
    }
    Ok(())
}

pub fn telescoping(closes: Vec<f64>) -> Check {
    let ch = price_changes(&series(&closes)).unwrap();
    let total: f64 = ch.valid_values().sum();
    let expected = closes[closes.len() - 1] - closes[0];
    prop_assert!((total - expected).abs() <= 1e-9 * closes.iter().map(|c| c.abs()).sum::<f64>());
    Ok(())
}

fn run<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

/// Every invariant in the suite, run with `cases` random inputs each.
pub fn run_suite(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "signal price-scale invariance",
            run(cases, scale_inputs(), signal_scale_invariance),
        ),
        (
            "P&L price-scale invariance",
            run(cases, scale_inputs(), pnl_scale_invariance),
        ),
        (
            "translation covariance",
            run(cases, translation_inputs(), translation_covariance),
        ),
        (
            "reversal antisymmetry",
            run(cases, closes_strategy(), reversal_antisymmetry),
        ),
        (
            "streaming/batch bit-equality",
            run(cases, gappy_series(), streaming_equals_batch),
        ),
        (
            "de-bias residual orthogonality",
            run(cases, debias_inputs(), debias_orthogonality),
        ),
        ("aggregate linearity", run(cases, pool_inputs(), aggregate_linearity)),
        ("price-change telescoping", run(cases, closes_strategy(), telescoping)),
    ]
}
