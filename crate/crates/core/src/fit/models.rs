use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ols::{ols, Ols, Singular};
use super::scatter::ScatterSet;
use crate::error::{Error, Result};

/// Number of log-spaced s* candidates.
pub const TANH_GRID_POINTS: usize = 64;
pub const TANH_S_STAR_MIN: f64 = 0.05;
pub const TANH_S_STAR_MAX: f64 = 20.0;
/// Relative tolerance of the golden-section refinement of s*.
pub const TANH_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Linear,
    Cubic,
    Tanh,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Linear => "linear",
            Model::Cubic => "cubic",
            Model::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    pub a: f64,
    pub b: f64,
    pub b2: Option<f64>,
    pub b3: Option<f64>,
    pub s_star: Option<f64>,
    /// Standard errors of `a`, `b`, then `b2`, `b3` when present. For the
    /// tanh model they are conditional on s*.
    pub stderr: Vec<f64>,
    pub sse: f64,
    pub n_points: usize,
    /// Tanh only: the data prefer the linear boundary of the family.
    pub linear_limit: bool,
}

impl FitResult {
    /// `(name, value, stderr)` per parameter; s* has no stderr.
    pub fn parameters(&self) -> Vec<(&'static str, f64, Option<f64>)> {
        let mut out = vec![
            ("a", self.a, self.stderr.first().copied()),
            ("b", self.b, self.stderr.get(1).copied()),
        ];
        if let Some(b2) = self.b2 {
            out.push(("b2", b2, self.stderr.get(2).copied()));
        }
        if let Some(b3) = self.b3 {
            out.push(("b3", b3, self.stderr.get(3).copied()));
        }
        if let Some(s) = self.s_star {
            out.push(("s_star", s, None));
        }
        out
    }

    /// Model prediction at signal `s`.
    pub fn predict(&self, s: f64) -> f64 {
        match self.model {
            Model::Linear => self.a + self.b * s,
            Model::Cubic => self.a + s * (self.b + s * (self.b2.unwrap_or(0.0) + s * self.b3.unwrap_or(0.0))),
            Model::Tanh => {
                let k = self.s_star.unwrap_or(TANH_S_STAR_MAX);
                if self.linear_limit {
                    self.a + self.b * s
                } else {
                    self.a + self.b * k * (s / k).tanh()
                }
            }
        }
    }
}

fn need(scatter: &ScatterSet, n: usize) -> Result<()> {
    if scatter.is_empty() {
        return Err(Error::EmptyScatter);
    }
    if scatter.len() < n {
        return Err(Error::TooShort {
            needed: n,
            available: scatter.len(),
        });
    }
    Ok(())
}

fn linear_ols(data: &[(f64, f64)]) -> std::result::Result<Ols<2>, Singular> {
    ols(data, |s| [1.0, s])
}

fn tanh_ols(data: &[(f64, f64)], s_star: f64) -> std::result::Result<Ols<2>, Singular> {
    ols(data, |s| [1.0, s_star * (s / s_star).tanh()])
}

/// Slope of the least squares line through `(x, y)` pairs; `None` if fewer
/// than two points or all `x` equal.
pub fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    linear_ols(points).ok().map(|f| f.coef[1])
}

/// Least squares line `d = a + b·s`.
pub fn fit_linear(scatter: &ScatterSet) -> Result<FitResult> {
    need(scatter, 3)?;
    let fit = linear_ols(&scatter.pairs()).map_err(|_| Error::DegenerateRegressor)?;
    Ok(FitResult {
        model: Model::Linear,
        a: fit.coef[0],
        b: fit.coef[1],
        b2: None,
        b3: None,
        s_star: None,
        stderr: fit.stderr.to_vec(),
        sse: fit.sse,
        n_points: scatter.len(),
        linear_limit: false,
    })
}

/// Least squares cubic `d = a + b·s + b2·s² + b3·s³`.
pub fn fit_cubic(scatter: &ScatterSet) -> Result<FitResult> {
    need(scatter, 5)?;
    let fit = ols(&scatter.pairs(), |s| [1.0, s, s * s, s * s * s]).map_err(|_| Error::RankDeficient)?;
    Ok(FitResult {
        model: Model::Cubic,
        a: fit.coef[0],
        b: fit.coef[1],
        b2: Some(fit.coef[2]),
        b3: Some(fit.coef[3]),
        s_star: None,
        stderr: fit.stderr.to_vec(),
        sse: fit.sse,
        n_points: scatter.len(),
        linear_limit: false,
    })
}

fn tanh_result(fit: &Ols<2>, s_star: f64, n_points: usize, linear_limit: bool) -> FitResult {
    FitResult {
        model: Model::Tanh,
        a: fit.coef[0],
        b: fit.coef[1],
        b2: None,
        b3: None,
        s_star: Some(s_star),
        stderr: fit.stderr.to_vec(),
        sse: fit.sse,
        n_points,
        linear_limit,
    }
}

/// Inner least squares of the tanh model at a fixed s*.
pub fn tanh_profile(scatter: &ScatterSet, s_star: f64) -> Result<FitResult> {
    need(scatter, 4)?;
    if !s_star.is_finite() || s_star <= 0.0 {
        return Err(Error::config(format!("s_star must be positive, got {s_star}")));
    }
    let fit = tanh_ols(&scatter.pairs(), s_star).map_err(|_| Error::DegenerateRegressor)?;
    Ok(tanh_result(&fit, s_star, scatter.len(), false))
}

/// The log-spaced s* candidates.
pub fn tanh_grid() -> Vec<f64> {
    let ratio = TANH_S_STAR_MAX / TANH_S_STAR_MIN;
    (0..TANH_GRID_POINTS)
        .map(|k| TANH_S_STAR_MIN * ratio.powf(k as f64 / (TANH_GRID_POINTS - 1) as f64))
        .collect()
}

/// Minimize `f` over `[lo, hi]` by golden-section search, returning the
/// best abscissa seen and its value.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Saturating response `d = a + b·s*·tanh(s/s*)`, profiled over s*.
///
/// When the best candidate sits on the upper edge of the s* range, or the
/// profiled optimum does no better than the straight line, the linear fit
/// is reported with `s_star` at the upper bound and `linear_limit` set.
pub fn fit_tanh(scatter: &ScatterSet) -> Result<FitResult> {
    need(scatter, 4)?;
    let data = scatter.pairs();
    let sse_at = |s_star: f64| tanh_ols(&data, s_star).map(|f| f.sse).unwrap_or(f64::INFINITY);
    let grid = tanh_grid();
    let profile: Vec<f64> = grid.par_iter().map(|&k| sse_at(k)).collect();
    let (best, best_sse) = profile
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    if !best_sse.is_finite() {
        return Err(Error::DegenerateRegressor);
    }
    let linear = linear_ols(&data).ok();
    let linear_limit_result = |lin: &Ols<2>| tanh_result(lin, TANH_S_STAR_MAX, data.len(), true);

    if best == TANH_GRID_POINTS - 1 {
        if let Some(lin) = &linear {
            return Ok(linear_limit_result(lin));
        }
    }
    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(TANH_GRID_POINTS - 1)].ln();
    let (u, refined_sse) = golden_section(|u| sse_at(u.exp()), lo, hi, TANH_REL_TOL);
    let s_star = if refined_sse <= best_sse { u.exp() } else { grid[best] };
    let fit = tanh_ols(&data, s_star).map_err(|_| Error::DegenerateRegressor)?;
    match &linear {
        Some(lin) if lin.sse < fit.sse => Ok(linear_limit_result(lin)),
        _ => Ok(tanh_result(&fit, s_star, data.len(), false)),
    }
}

/// Smoothed response: mean `(s, d)` over sliding blocks of consecutive
/// points in signal order.
///
/// `stride` defaults to `ceil(block / 10)`.
pub fn running_average(scatter: &ScatterSet, block: usize, stride: Option<usize>) -> Result<Vec<(f64, f64)>> {
    if scatter.is_empty() {
        return Err(Error::EmptyScatter);
    }
    if block == 0 {
        return Err(Error::config("block must be positive"));
    }
    if block > scatter.len() {
        return Err(Error::TooShort {
            needed: block,
            available: scatter.len(),
        });
    }
    let stride = stride.unwrap_or(block.div_ceil(10)).max(1);
    let mut pairs = scatter.pairs();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ps = vec![0.0; pairs.len() + 1];
    let mut pd = vec![0.0; pairs.len() + 1];
    for (i, &(s, d)) in pairs.iter().enumerate() {
        ps[i + 1] = ps[i] + s;
        pd[i + 1] = pd[i] + d;
    }
    let b = block as f64;
    Ok((0..=pairs.len() - block)
        .step_by(stride)
        .map(|i| ((ps[i + block] - ps[i]) / b, (pd[i + block] - pd[i]) / b))
        .collect())
}
