mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{planted_closes, wobbly_ramp, write_pool};
use tempfile::TempDir;

fn trend(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_trend")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    r.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn ramp_pool(dir: &TempDir) -> std::path::PathBuf {
    write_pool(dir.path(), "ramp", &[("ramp", "index", wobbly_ramp(240))])
}

#[test]
fn empty_manifest_exits_2() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("empty.toml");
    fs::write(&m, "base_frequency = \"monthly\"\n").unwrap();
    let (code, err) = trend(&["backtest", "--manifest", path(&m), "--out", path(&dir.path().join("o"))]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("empty manifest"));
}

#[test]
fn missing_manifest_exits_3() {
    let dir = TempDir::new().unwrap();
    let (code, _) = trend(&["backtest", "--manifest", path(&dir.path().join("nope.toml"))]);
    assert_eq!(code, 3);
}

#[test]
fn bad_arguments_exit_2() {
    let dir = TempDir::new().unwrap();
    let m = ramp_pool(&dir);
    assert_eq!(trend(&["backtest", "--manifest", path(&m), "--n", "0"]).0, 2);
    assert_eq!(trend(&["backtest", "--bogus"]).0, 2);
    assert_eq!(trend(&["--help"]).0, 0);
}

#[test]
fn ramp_backtest_reports_positive_sharpe() {
    let dir = TempDir::new().unwrap();
    let m = ramp_pool(&dir);
    let out = dir.path().join("run");
    let (code, err) = trend(&["backtest", "--manifest", path(&m), "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["headline"]["sharpe"].as_f64().unwrap() > 0.0);
    for f in [
        "pnl_aggregate.csv",
        "pnl_ramp.csv",
        "stats_sector.csv",
        "stats_decade.csv",
        "stats_50y.csv",
        "drawdowns.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
        assert!(report["files"].as_array().unwrap().iter().any(|x| x == f));
    }
    assert!(out.join("manifest.toml").exists());
    assert!(out.join("rolling.csv").exists());
}

#[test]
fn n_sweep_has_seven_rows() {
    let dir = TempDir::new().unwrap();
    let m = ramp_pool(&dir);
    let out = dir.path().join("run");
    let (code, err) = trend(&["backtest", "--manifest", path(&m), "--out", path(&out), "--n-sweep"]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&out.join("stats_timescale.csv"));
    let ns: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ns, ["2", "3", "5", "7", "10", "15", "20"]);
}

#[test]
fn backtest_artifacts_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let closes = planted_closes(400, 3, |s| 0.05 * s.tanh(), 1.0);
    let m = write_pool(
        dir.path(),
        "p",
        &[("a", "bond", closes), ("b", "index", wobbly_ramp(300))],
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for o in [&a, &b] {
        let args = [
            "backtest",
            "--manifest",
            path(&m),
            "--out",
            path(o),
            "--n-sweep",
            "--rescale-aggregate",
        ];
        assert_eq!(trend(&args).0, 0);
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let csvs: Vec<_> = names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")).collect();
    assert!(csvs.len() >= 9);
    for n in csvs {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?}");
    }
}

#[test]
fn explicit_window_longer_than_history_fails() {
    let dir = TempDir::new().unwrap();
    let m = ramp_pool(&dir);
    let o = dir.path().join("o");
    let args = [
        "backtest",
        "--manifest",
        path(&m),
        "--out",
        path(&o),
        "--window-years",
        "50",
    ];
    assert_eq!(trend(&args).0, 2);
}

fn fit_value(file: &Path, param: &str) -> String {
    csv_rows(file).into_iter().find(|r| r[0] == param).unwrap()[1].clone()
}

#[test]
fn fit_on_tanh_pool_prefers_tanh() {
    let dir = TempDir::new().unwrap();
    let response = |s: f64| 0.6 * 0.7 * (s / 0.7).tanh();
    let m = write_pool(
        dir.path(),
        "t",
        &[
            ("a", "index", planted_closes(3000, 1, response, 1.0)),
            ("b", "bond", planted_closes(3000, 2, response, 1.0)),
        ],
    );
    let out = dir.path().join("fit");
    let (code, err) = trend(&["fit", "--manifest", path(&m), "--out", path(&out), "--block", "500"]);
    assert_eq!(code, 0, "{err}");
    let tanh_sse: f64 = fit_value(&out.join("fit_tanh.csv"), "sse").parse().unwrap();
    let lin_sse: f64 = fit_value(&out.join("fit_linear.csv"), "sse").parse().unwrap();
    assert!(tanh_sse < lin_sse);
    assert_eq!(fit_value(&out.join("fit_tanh.csv"), "linear_limit"), "false");
    assert!(out.join("running_average.csv").exists());
    assert!(out.join("scatter.csv").exists());
    assert!(out.join("fit_summary.json").exists());
}

#[test]
fn fit_on_linear_pool_hits_linear_limit() {
    let dir = TempDir::new().unwrap();
    let m = write_pool(
        dir.path(),
        "l",
        &[("a", "index", planted_closes(3000, 5, |s| 0.3 * s, 1e-3))],
    );
    let out = dir.path().join("fit");
    let (code, err) = trend(&["fit", "--manifest", path(&m), "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(fit_value(&out.join("fit_tanh.csv"), "linear_limit"), "true");
}

#[test]
fn fit_block_larger_than_scatter_exits_2() {
    let dir = TempDir::new().unwrap();
    let m = write_pool(
        dir.path(),
        "s",
        &[("a", "index", planted_closes(1200, 5, |s| 0.1 * s, 1.0))],
    );
    let (code, _) = trend(&[
        "fit",
        "--manifest",
        path(&m),
        "--out",
        path(&dir.path().join("o")),
        "--block",
        "5000",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn fit_on_flat_pool_has_empty_scatter() {
    let dir = TempDir::new().unwrap();
    let m = write_pool(dir.path(), "f", &[("a", "index", vec![100.0; 60])]);
    let (code, err) = trend(&["fit", "--manifest", path(&m), "--out", path(&dir.path().join("o"))]);
    assert_eq!(code, 2);
    assert!(err.contains("empty scatter"));
}

#[test]
fn montecarlo_null_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let exp = dir.path().join("null.toml");
    fs::write(&exp, "kind = \"null\"\ntrials = 100\nyears = 20\nseed = 17\n").unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for o in [&a, &b] {
        let (code, err) = trend(&["montecarlo", "--experiment", path(&exp), "--out", path(o)]);
        assert_eq!(code, 0, "{err}");
    }
    for f in ["mc_null.csv", "mc_summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let stats: Vec<String> = csv_rows(&a.join("mc_summary.csv"))
        .into_iter()
        .map(|r| r[0].clone())
        .collect();
    assert!(
        stats.iter().any(|s| s == "mean") && stats.iter().any(|s| s == "stdev") && stats.iter().any(|s| s == "q0.5")
    );

    let c = dir.path().join("c");
    assert_eq!(
        trend(&[
            "montecarlo",
            "--experiment",
            path(&exp),
            "--out",
            path(&c),
            "--seed",
            "18"
        ])
        .0,
        0
    );
    assert_ne!(
        fs::read(a.join("mc_null.csv")).unwrap(),
        fs::read(c.join("mc_null.csv")).unwrap()
    );
}

#[test]
fn montecarlo_power_emits_kappa_table() {
    let dir = TempDir::new().unwrap();
    let exp = dir.path().join("power.toml");
    fs::write(
        &exp,
        "kind = \"power\"\ntrials = 100\nkappas = [0.0, 0.3]\nyears = 20\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    assert_eq!(
        trend(&["montecarlo", "--experiment", path(&exp), "--out", path(&out)]).0,
        0
    );
    let rows = csv_rows(&out.join("mc_power.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "0.3");
}

#[test]
fn montecarlo_drawdown_emits_slopes() {
    let dir = TempDir::new().unwrap();
    let exp = dir.path().join("dd.toml");
    fs::write(
        &exp,
        "kind = \"drawdown_scaling\"\nsharpes = [0.5, 1.0]\ntrials = 20\nyears = 30\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    assert_eq!(
        trend(&["montecarlo", "--experiment", path(&exp), "--out", path(&out)]).0,
        0
    );
    assert_eq!(csv_rows(&out.join("mc_drawdown.csv")).len(), 2);
    assert_eq!(csv_rows(&out.join("mc_drawdown_slopes.csv")).len(), 4);
}

#[test]
fn montecarlo_invalid_spec_exits_2() {
    let dir = TempDir::new().unwrap();
    let exp = dir.path().join("bad.toml");
    for body in [
        "kind = \"null\"\ntrials = 10\nyears = 20\n",
        "kind = \"what\"\n",
        "kind = \"power\"\ntrials = 100\nkappas = [1.5]\nyears = 5\n",
    ] {
        fs::write(&exp, body).unwrap();
        assert_eq!(
            trend(&[
                "montecarlo",
                "--experiment",
                path(&exp),
                "--out",
                path(&dir.path().join("o"))
            ])
            .0,
            2,
            "{body}"
        );
    }
}

#[test]
fn proxy_of_identical_pools_correlates_perfectly() {
    let dir = TempDir::new().unwrap();
    let m = write_pool(
        dir.path(),
        "p",
        &[
            ("a", "bond", planted_closes(400, 1, |_| 0.0, 1.0)),
            ("b", "commodity", planted_closes(400, 2, |_| 0.0, 1.0)),
        ],
    );
    let out = dir.path().join("o");
    let (code, err) = trend(&[
        "validate-proxy",
        "--manifest",
        path(&m),
        "--proxy-manifest",
        path(&m),
        "--out",
        path(&out),
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = csv_rows(&out.join("proxy_correlation.csv"));
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!((r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn proxy_with_noise_correlates_partially() {
    let dir = TempDir::new().unwrap();
    let base = planted_closes(600, 1, |_| 0.0, 1.0);
    let noise = planted_closes(600, 99, |_| 0.0, 1.0);
    let noisy: Vec<f64> = base.iter().zip(&noise).map(|(b, n)| b + 0.5 * (n - 1000.0)).collect();
    let a = write_pool(dir.path(), "a", &[("x", "index", base)]);
    let b = write_pool(dir.path(), "b", &[("x", "index", noisy)]);
    let out = dir.path().join("o");
    assert_eq!(
        trend(&[
            "validate-proxy",
            "--manifest",
            path(&a),
            "--proxy-manifest",
            path(&b),
            "--out",
            path(&out)
        ])
        .0,
        0
    );
    let c: f64 = csv_rows(&out.join("proxy_correlation.csv"))[0][1].parse().unwrap();
    assert!(c > 0.0 && c < 1.0, "{c}");
}

#[test]
fn proxy_without_overlap_exits_2() {
    let dir = TempDir::new().unwrap();
    let a = write_pool(dir.path(), "a", &[("x", "index", wobbly_ramp(100))]);
    let late = dir.path().join("late.csv");
    let mut body = String::from("date,close\n");
    for (i, c) in planted_closes(100, 1, |_| 0.0, 1.0).iter().enumerate() {
        let y = 2000 + i / 12;
        let m = i % 12 + 1;
        body.push_str(&format!("{y}-{m:02}-15,{c}\n"));
    }
    fs::write(&late, body).unwrap();
    let b = dir.path().join("b.toml");
    fs::write(
        &b,
        "base_frequency = \"monthly\"\n[[entries]]\nid = \"x\"\nsector = \"index\"\npath = \"late.csv\"\n",
    )
    .unwrap();
    let (code, _) = trend(&[
        "validate-proxy",
        "--manifest",
        path(&a),
        "--proxy-manifest",
        path(&b),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn export_signals_writes_one_file_per_instrument() {
    let dir = TempDir::new().unwrap();
    let m = write_pool(
        dir.path(),
        "p",
        &[("a/b", "index", wobbly_ramp(50)), ("c", "bond", wobbly_ramp(60))],
    );
    let out = dir.path().join("o");
    assert_eq!(
        trend(&["export-signals", "--manifest", path(&m), "--out", path(&out)]).0,
        0
    );
    assert_eq!(csv_rows(&out.join("signals_a_b.csv")).len(), 50);
    assert_eq!(csv_rows(&out.join("signals_c.csv")).len(), 60);
}
