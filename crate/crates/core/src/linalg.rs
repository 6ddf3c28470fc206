//! Dense linear solves with a residual check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solve `a x = b` by partially pivoted LU plus one step of iterative
/// refinement, and reject the answer unless
/// `||a x - b||_inf <= 1e-10 * max(||b||_inf, ||a||_inf ||x||_inf, 1)`.
pub fn solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    solve_with_tolerance(a, b, 1e-10)
}

pub fn solve_with_tolerance(a: DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> Result<DVector<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::param(format!(
            "linear system shape mismatch: {}x{} with rhs {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let lu = a.clone().lu();
    let mut x = lu
        .solve(b)
        .ok_or_else(|| Error::numerical("singular linear system"))?;
    if let Some(dx) = lu.solve(&(b - &a * &x)) {
        x += dx;
    }
    let resid = (&a * &x - b).amax();
    let a_norm = a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let scale = b.amax().max(a_norm * x.amax()).max(1.0);
    if !resid.is_finite() || resid > rel_tol * scale {
        return Err(Error::numerical(format!(
            "linear solve residual {resid:e} exceeds {:e}",
            rel_tol * scale
        )));
    }
    Ok(x)
}
