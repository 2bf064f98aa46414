//! Small dense least squares through the normal equations.

use nalgebra::{SMatrix, SVector};

/// Relative Cholesky pivot below which the design is treated as singular.
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ols<const K: usize> {
    pub coef: [f64; K],
    pub stderr: [f64; K],
    pub sse: f64,
}

/// The design is singular (a column is zero or linearly dependent).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Singular;

/// Least squares of `y` on the columns produced by `row(x)`.
///
/// The normal matrix is Jacobi-scaled before factorization and the solution
/// is polished with one step of iterative refinement against the data.
pub(crate) fn ols<const K: usize>(data: &[(f64, f64)], row: impl Fn(f64) -> [f64; K]) -> Result<Ols<K>, Singular> {
    let mut xtx = SMatrix::<f64, K, K>::zeros();
    let mut xty = SVector::<f64, K>::zeros();
    for &(x, y) in data {
        let r = SVector::<f64, K>::from(row(x));
        xtx += r * r.transpose();
        xty += r * y;
    }
    let mut scale = SVector::<f64, K>::zeros();
    for j in 0..K {
        if !xtx[(j, j)].is_finite() || xtx[(j, j)] <= 0.0 {
            return Err(Singular);
        }
        scale[j] = 1.0 / xtx[(j, j)].sqrt();
    }
    let d = SMatrix::<f64, K, K>::from_diagonal(&scale);
    let a = d * xtx * d;
    let chol = a.cholesky().ok_or(Singular)?;
    if (0..K).any(|j| chol.l_dirty()[(j, j)].powi(2) < PIVOT_TOL) {
        return Err(Singular);
    }
    let solve = |rhs: &SVector<f64, K>| d * chol.solve(&(d * rhs));
    let mut beta = solve(&xty);

    let fitted = |beta: &SVector<f64, K>, x: f64| SVector::<f64, K>::from(row(x)).dot(beta);
    let mut grad = SVector::<f64, K>::zeros();
    for &(x, y) in data {
        grad += SVector::<f64, K>::from(row(x)) * (y - fitted(&beta, x));
    }
    beta += solve(&grad);

    let sse: f64 = data.iter().map(|&(x, y)| (y - fitted(&beta, x)).powi(2)).sum();
    let dof = data.len().saturating_sub(K).max(1) as f64;
    let sigma2 = sse / dof;
    let inv = d * chol.inverse() * d;
    let mut stderr = [0.0; K];
    for (j, e) in stderr.iter_mut().enumerate() {
        *e = (sigma2 * inv[(j, j)]).max(0.0).sqrt();
    }
    Ok(Ols {
        coef: beta.into(),
        stderr,
        sse,
    })
}
