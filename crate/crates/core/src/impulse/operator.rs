use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde::ScalarField;

/// Search over intervention targets `x + z ∈ [lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZSearch {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
    pub tol: f64,
}

impl ZSearch {
    pub fn over(lo: f64, hi: f64) -> Self {
        Self { lo, hi, nodes: 401, tol: 1e-6 }
    }
}

/// `Mφ(t, x)` and a minimiser `ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intervention {
    pub value: f64,
    pub z: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `Mφ(t, x) = inf_z φ(t, x + z) + K(t, x, z)` by a uniform grid over targets,
/// then one golden-section pass on the bracket around the best node. Ties go
/// to the smaller `|z|`.
pub fn intervention_operator<F, K>(phi: &F, cost: K, t: f64, x: f64, search: &ZSearch) -> Result<Intervention>
where
    F: ScalarField + ?Sized,
    K: Fn(f64, f64, f64) -> f64,
{
    if !(search.lo < search.hi) || search.nodes < 2 || !(search.tol > 0.0) {
        return Err(Error::param("empty intervention search range"));
    }
    let objective = |y: f64| phi.value(t, y) + cost(t, x, y - x);
    let step = (search.hi - search.lo) / (search.nodes - 1) as f64;
    let mut best = (f64::INFINITY, 0usize, f64::NAN);
    for k in 0..search.nodes {
        let y = search.lo + k as f64 * step;
        let v = objective(y);
        if !v.is_finite() {
            continue;
        }
        let tie = (v - best.0).abs() <= 1e-14 * v.abs().max(1.0);
        if (v < best.0 && !tie) || (tie && (y - x).abs() < (best.2 - x).abs()) {
            best = (v, k, y);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::param("no feasible intervention target"));
    }
    let (mut a, mut b) = (
        search.lo + best.1.saturating_sub(1) as f64 * step,
        search.lo + (best.1 + 1).min(search.nodes - 1) as f64 * step,
    );
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > search.tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
    }
    let y = 0.5 * (a + b);
    let v = objective(y);
    let (value, target) = if v < best.0 - 1e-14 * best.0.abs().max(1.0) { (v, y) } else { (best.0, best.2) };
    Ok(Intervention { value, z: target - x })
}
