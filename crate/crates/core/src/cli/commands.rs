use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use super::output::{file_stem, num, opt, OutputDir};
use super::{BacktestArgs, FitArgs, MontecarloArgs, PoolArgs, ProxyArgs};
use crate::backtest::{
    aggregate, breakdown, drawdowns, proxy_correlation, rolling_pnl, run_pool, stats_report, BreakdownRow, Grouping,
    InstrumentRun, PnlSeries, StatsReport,
};
use crate::error::{Error, Result};
use crate::fit::{build_scatter, fit_cubic, fit_linear, fit_tanh, running_average, FitResult};
use crate::ingest::{load_manifest, load_pool};
use crate::montecarlo::{run_experiment, Experiment, ExperimentOutput, McSummary};
use crate::series::{Instrument, Sector};
use crate::signal::{compute_signal, TrendConfig};

/// Timescales of the `--n-sweep` table.
pub const N_SWEEP: [f64; 7] = [2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0];
const DEFAULT_WINDOW_YEARS: f64 = 10.0;
const DEFAULT_BLOCK: usize = 5000;

fn trend_config(n: f64) -> Result<TrendConfig> {
    let cfg = TrendConfig::with_n(n);
    cfg.validate()?;
    Ok(cfg)
}

fn load(args: &PoolArgs, path: &Path) -> Result<Vec<Instrument>> {
    let mut manifest = load_manifest(path)?;
    if let Some(f) = args.frequency {
        manifest.base_frequency = f;
    }
    load_pool(&manifest)
}

fn metadata(command: &str, config: &impl serde::Serialize) -> Value {
    json!({
        "command": command,
        "engine_version": env!("CARGO_PKG_VERSION"),
        "timestamp": chrono::Utc::now().to_rfc3339(),
        "config": config,
    })
}

fn aggregates(runs: &[InstrumentRun], rescale: bool) -> Result<(PnlSeries, PnlSeries)> {
    let trend = aggregate(&runs.iter().map(|r| &r.trend).collect::<Vec<_>>())?;
    let long = aggregate(&runs.iter().map(|r| &r.long).collect::<Vec<_>>())?;
    Ok(if rescale {
        (trend.rescaled_by_breadth(), long.rescaled_by_breadth())
    } else {
        (trend, long)
    })
}

const STATS_HEADER: [&str; 8] = [
    "sharpe",
    "tstat",
    "tstat_debiased",
    "beta",
    "correlation_long",
    "drift_sharpe",
    "drift_tstat",
    "n_years",
];

fn stats_cells(s: &StatsReport) -> Vec<String> {
    [
        s.sharpe,
        s.tstat,
        s.tstat_debiased,
        s.beta,
        s.correlation_long,
        s.drift_sharpe,
        s.drift_tstat,
        s.n_years,
    ]
    .into_iter()
    .map(num)
    .collect()
}

fn write_breakdown(out: &mut OutputDir, name: &str, rows: &[BreakdownRow]) -> Result<()> {
    let header = [
        "group",
        "sharpe",
        "tstat",
        "tstat_debiased",
        "drift_sharpe",
        "drift_tstat",
        "n_years",
    ];
    out.write_csv(
        name,
        &header,
        rows.iter().map(|r| {
            let mut cells = vec![r.key.clone()];
            match &r.stats {
                Some(s) => cells.extend(
                    [
                        s.sharpe,
                        s.tstat,
                        s.tstat_debiased,
                        s.drift_sharpe,
                        s.drift_tstat,
                        s.n_years,
                    ]
                    .map(num),
                ),
                None => cells.extend(std::iter::repeat_n(String::new(), 6)),
            }
            cells
        }),
    )
}

fn write_pnl(out: &mut OutputDir, name: &str, trend: &PnlSeries, long: &PnlSeries) -> Result<()> {
    let cum = trend.cumulative();
    let cum_long = long.cumulative();
    out.write_csv(
        name,
        &["date", "pnl", "cum_pnl", "valid", "long_pnl", "cum_long_pnl", "active"],
        trend.points.iter().enumerate().map(|(i, p)| {
            let l = long.points.get(i);
            vec![
                p.label.to_string(),
                num(p.pnl),
                num(cum[i]),
                p.valid.to_string(),
                opt(l.map(|l| l.pnl)),
                opt(cum_long.get(i).copied()),
                p.active.to_string(),
            ]
        }),
    )
}

pub fn cmd_backtest(args: &BacktestArgs) -> Result<()> {
    let cfg = trend_config(args.pool.n)?;
    if let Some(w) = args.window_years {
        if w.is_nan() || w <= 0.0 {
            return Err(Error::config(format!("window_years must be positive, got {w}")));
        }
    }
    let pool = load(&args.pool, &args.pool.manifest)?;
    let runs = run_pool(&pool, &cfg)?;
    let (trend, long) = aggregates(&runs, args.rescale_aggregate)?;
    let headline = stats_report(&trend, &long)?;

    let mut out = OutputDir::create(&args.pool.out)?;
    out.copy_in(&args.pool.manifest, "manifest.toml")?;
    write_pnl(&mut out, "pnl_aggregate.csv", &trend, &long)?;
    for r in &runs {
        write_pnl(&mut out, &format!("pnl_{}.csv", file_stem(&r.id)), &r.trend, &r.long)?;
    }

    let mut tables = serde_json::Map::new();
    for (grouping, name) in [
        (Grouping::BySector, "stats_sector.csv"),
        (Grouping::ByDecade, "stats_decade.csv"),
        (Grouping::By50Years, "stats_50y.csv"),
    ] {
        let rows = breakdown(&runs, grouping)?;
        write_breakdown(&mut out, name, &rows)?;
        tables.insert(name.trim_end_matches(".csv").to_string(), json!(rows));
    }

    if args.n_sweep {
        let rows: Vec<(f64, StatsReport)> = N_SWEEP
            .iter()
            .map(|&n| {
                let runs = run_pool(&pool, &trend_config(n)?)?;
                let (t, l) = aggregates(&runs, args.rescale_aggregate)?;
                Ok((n, stats_report(&t, &l)?))
            })
            .collect::<Result<_>>()?;
        let mut header = vec!["n"];
        header.extend(STATS_HEADER);
        out.write_csv(
            "stats_timescale.csv",
            &header,
            rows.iter().map(|(n, s)| {
                let mut cells = vec![num(*n)];
                cells.extend(stats_cells(s));
                cells
            }),
        )?;
        tables.insert(
            "stats_timescale".into(),
            json!(rows
                .iter()
                .map(|(n, s)| json!({"n": n, "stats": s}))
                .collect::<Vec<_>>()),
        );
    }

    let window = args.window_years.unwrap_or(DEFAULT_WINDOW_YEARS);
    match rolling_pnl(&trend, window) {
        Ok(rolling) => out.write_csv(
            "rolling.csv",
            &["date", "rolling_pnl", "valid"],
            rolling
                .points
                .iter()
                .map(|p| vec![p.label.to_string(), num(p.value), p.valid.to_string()]),
        )?,
        Err(Error::TooShort { .. }) if args.window_years.is_none() => {}
        Err(e) => return Err(e),
    }

    let dd = drawdowns(&trend);
    out.write_csv(
        "drawdowns.csv",
        &["start", "trough", "end", "depth", "duration_years"],
        dd.iter().map(|d| {
            vec![
                d.start.to_string(),
                d.trough.to_string(),
                d.end.map(|e| e.to_string()).unwrap_or_default(),
                num(d.depth),
                num(d.duration_years),
            ]
        }),
    )?;

    let report = json!({
        "metadata": metadata("backtest", args),
        "headline": headline,
        "tables": tables,
        "instruments": runs.iter().map(|r| json!({"id": r.id, "sector": r.sector})).collect::<Vec<_>>(),
        "files": out.files(),
    });
    out.write_json("report.json", &report)
}

fn write_fit(out: &mut OutputDir, name: &str, fit: &FitResult) -> Result<()> {
    let mut rows: Vec<Vec<String>> = fit
        .parameters()
        .into_iter()
        .map(|(p, v, e)| vec![p.to_string(), num(v), opt(e)])
        .collect();
    rows.push(vec!["sse".into(), num(fit.sse), String::new()]);
    rows.push(vec!["n_points".into(), fit.n_points.to_string(), String::new()]);
    rows.push(vec!["linear_limit".into(), fit.linear_limit.to_string(), String::new()]);
    out.write_csv(name, &["param", "value", "stderr"], rows)
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let cfg = trend_config(args.pool.n)?;
    let pool = load(&args.pool, &args.pool.manifest)?;
    let scatter = build_scatter(&pool, &cfg, args.normalization)?;
    let block = args.block.unwrap_or(DEFAULT_BLOCK.min(scatter.len()));
    let smooth = running_average(&scatter, block, None)?;
    let linear = fit_linear(&scatter)?;
    let cubic = fit_cubic(&scatter)?;
    let tanh = fit_tanh(&scatter)?;

    let mut out = OutputDir::create(&args.pool.out)?;
    out.write_csv(
        "scatter.csv",
        &["id", "date", "s", "d"],
        scatter
            .points
            .iter()
            .map(|p| vec![p.id.clone(), p.label.to_string(), num(p.s), num(p.d)]),
    )?;
    write_fit(&mut out, "fit_linear.csv", &linear)?;
    write_fit(&mut out, "fit_cubic.csv", &cubic)?;
    write_fit(&mut out, "fit_tanh.csv", &tanh)?;
    out.write_csv(
        "running_average.csv",
        &["s", "d"],
        smooth.iter().map(|(s, d)| vec![num(*s), num(*d)]),
    )?;
    let summary = json!({
        "metadata": metadata("fit", args),
        "normalization": scatter.normalization,
        "n_points": scatter.len(),
        "block": block,
        "fits": [linear, cubic, tanh],
        "sse": {"linear": linear.sse, "cubic": cubic.sse, "tanh": tanh.sse},
        "files": out.files(),
    });
    out.write_json("fit_summary.json", &summary)
}

fn summary_rows(s: &McSummary) -> Vec<Vec<String>> {
    let mut rows = vec![
        vec!["n_trials".into(), s.n_trials.to_string()],
        vec!["mean".into(), num(s.mean)],
        vec!["stdev".into(), num(s.stdev)],
    ];
    rows.extend(s.quantiles.iter().map(|q| vec![format!("q{}", num(q.p)), num(q.value)]));
    rows
}

/// Split the optional top-level `seed` from the experiment table.
fn read_experiment(path: &Path) -> Result<(Experiment, Option<u64>)> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: None,
        message,
    };
    let mut table: toml::Table = toml::from_str(&text).map_err(|e| parse_err(e.message().to_string()))?;
    let seed = match table.remove("seed") {
        None => None,
        Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(other) => return Err(parse_err(format!("seed must be a non-negative integer, got {other}"))),
    };
    let experiment = Experiment::deserialize(toml::Value::Table(table)).map_err(|e| parse_err(e.to_string()))?;
    Ok((experiment, seed))
}

pub fn cmd_montecarlo(args: &MontecarloArgs) -> Result<()> {
    let cfg = trend_config(args.n)?;
    let (experiment, file_seed) = read_experiment(&args.experiment)?;
    let seed = args.seed.or(file_seed).unwrap_or(0);
    let output = run_experiment(&experiment, seed, &cfg)?;
    let mut out = OutputDir::create(&args.out)?;
    let result = match &output {
        ExperimentOutput::Null(run) => {
            out.write_csv(
                "mc_null.csv",
                &["trial", "tstat_debiased"],
                run.tstats.iter().enumerate().map(|(i, t)| vec![i.to_string(), num(*t)]),
            )?;
            let mut rows = summary_rows(&run.summary);
            rows.push(vec!["p_tstat_ge_5".into(), num(run.tail_ge_5)]);
            rows.push(vec!["regenerations".into(), run.regenerations.to_string()]);
            out.write_csv("mc_summary.csv", &["stat", "value"], rows)?;
            json!({"summary": run.summary, "p_tstat_ge_5": run.tail_ge_5, "regenerations": run.regenerations})
        }
        ExperimentOutput::Power(table) => {
            out.write_csv(
                "mc_power.csv",
                &[
                    "kappa",
                    "mean_tstat",
                    "stdev_tstat",
                    "q05",
                    "median",
                    "q95",
                    "mean_total_pnl",
                ],
                table.rows.iter().map(|r| {
                    let q = |p: f64| {
                        r.summary
                            .quantiles
                            .iter()
                            .find(|x| x.p == p)
                            .map(|x| num(x.value))
                            .unwrap_or_default()
                    };
                    vec![
                        num(r.kappa),
                        num(r.summary.mean),
                        num(r.summary.stdev),
                        q(0.05),
                        q(0.5),
                        q(0.95),
                        num(r.mean_total_pnl),
                    ]
                }),
            )?;
            json!(table)
        }
        ExperimentOutput::DrawdownScaling(scaling) => {
            out.write_csv(
                "mc_drawdown.csv",
                &[
                    "sharpe",
                    "n_completed",
                    "n_open",
                    "median_years",
                    "mean_years",
                    "weighted_median_years",
                    "weighted_mean_years",
                ],
                scaling.rows.iter().map(|r| {
                    vec![
                        num(r.sharpe),
                        r.n_completed.to_string(),
                        r.n_open.to_string(),
                        num(r.median_years),
                        num(r.mean_years),
                        num(r.weighted_median_years),
                        num(r.weighted_mean_years),
                    ]
                }),
            )?;
            out.write_csv(
                "mc_drawdown_slopes.csv",
                &["statistic", "loglog_slope"],
                [
                    ("median", scaling.slope_median),
                    ("mean", scaling.slope_mean),
                    ("weighted_median", scaling.slope_weighted_median),
                    ("weighted_mean", scaling.slope_weighted_mean),
                ]
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), opt(v)]),
            )?;
            json!(scaling)
        }
    };
    let report = json!({
        "metadata": metadata("montecarlo", args),
        "experiment": experiment,
        "seed": seed,
        "result": result,
        "files": out.files(),
    });
    out.write_json("mc_report.json", &report)
}

fn overlap_len(a: &PnlSeries, b: &PnlSeries) -> usize {
    let la: BTreeSet<_> = a.points.iter().filter(|p| p.valid).map(|p| p.label).collect();
    b.points.iter().filter(|p| p.valid && la.contains(&p.label)).count()
}

pub fn cmd_validate_proxy(args: &ProxyArgs) -> Result<()> {
    let cfg = trend_config(args.pool.n)?;
    let runs_a = run_pool(&load(&args.pool, &args.pool.manifest)?, &cfg)?;
    let runs_b = run_pool(&load(&args.pool, &args.proxy_manifest)?, &cfg)?;
    let (agg_a, _) = aggregates(&runs_a, false)?;
    let (agg_b, _) = aggregates(&runs_b, false)?;
    let overall = proxy_correlation(&agg_a, &agg_b)?;

    let mut rows = vec![("overall".to_string(), Some(overall), overlap_len(&agg_a, &agg_b))];
    for sector in Sector::ALL {
        let pick = |runs: &[InstrumentRun]| -> Vec<InstrumentRun> {
            runs.iter().filter(|r| r.sector == sector).cloned().collect()
        };
        let (sa, sb) = (pick(&runs_a), pick(&runs_b));
        if sa.is_empty() || sb.is_empty() {
            continue;
        }
        let (ta, _) = aggregates(&sa, false)?;
        let (tb, _) = aggregates(&sb, false)?;
        let c = match proxy_correlation(&ta, &tb) {
            Ok(c) => Some(c),
            Err(Error::EmptyOverlap | Error::TooShort { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push((sector.to_string(), c, overlap_len(&ta, &tb)));
    }

    let mut out = OutputDir::create(&args.pool.out)?;
    out.write_csv(
        "proxy_correlation.csv",
        &["scope", "correlation", "n_overlap"],
        rows.iter().map(|(k, c, n)| vec![k.clone(), opt(*c), n.to_string()]),
    )?;
    let report = json!({
        "metadata": metadata("validate-proxy", args),
        "correlations": rows.iter().map(|(k, c, n)| json!({"scope": k, "correlation": c, "n_overlap": n})).collect::<Vec<_>>(),
        "files": out.files(),
    });
    out.write_json("proxy_report.json", &report)
}

pub fn cmd_export_signals(args: &PoolArgs) -> Result<()> {
    let cfg = trend_config(args.n)?;
    let pool = load(args, &args.manifest)?;
    let mut out = OutputDir::create(&args.out)?;
    for inst in &pool {
        let sig = compute_signal(&inst.series, &cfg)?;
        out.write_csv(
            &format!("signals_{}.csv", file_stem(&inst.id)),
            &["date", "close", "ref_price", "vol", "signal", "valid"],
            inst.series.periods().iter().zip(&sig.points).map(|(p, s)| {
                vec![
                    p.label.to_string(),
                    opt(p.usable()),
                    num(s.ref_price),
                    num(s.vol),
                    num(s.signal),
                    s.valid.to_string(),
                ]
            }),
        )?;
    }
    Ok(())
}
