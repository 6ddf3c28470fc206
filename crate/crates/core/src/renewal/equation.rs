use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretised renewal function and key-renewal quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalEquationSolution {
    pub delta: f64,
    /// `m(kΔ)`, `k = 0..=n`.
    pub m: Vec<f64>,
    /// `∫_0^{t_max} f(t_max − s) dm(s)`.
    pub convolution: f64,
    /// `(1/μ) ∫_0^∞ f`, both integrals taken on the grid.
    pub limit: f64,
    /// μ on the grid, `∫ F̄`.
    pub mu: f64,
}

/// Largest grid the solver accepts.
pub const MAX_NODES: usize = 10_000_000;

fn grid_len(t: f64, delta: f64) -> Result<usize> {
    if !(delta.is_finite() && delta > 0.0) || !(t.is_finite() && t > 0.0) {
        return Err(Error::param("need t > 0 and Δ > 0"));
    }
    let n = (t / delta).round();
    if n < 1.0 || n > MAX_NODES as f64 {
        return Err(Error::param(format!("grid of {n} steps is out of range")));
    }
    Ok(n as usize)
}

fn trapezoid(ys: &[f64], h: f64) -> f64 {
    if ys.len() < 2 {
        return 0.0;
    }
    h * (ys.iter().sum::<f64>() - 0.5 * (ys[0] + ys[ys.len() - 1]))
}

/// Solve `m = F + F ∗ m` on `t_k = kΔ` by the trapezoidal Stieltjes rule,
///
/// `m_n = F_n + Σ_{j=1}^{n} ½ (m_{n−j} + m_{n−j+1}) (F_j − F_{j−1})`,
///
/// implicit only through the `j = 1` term. Intervals with `F_j = F_{j−1}`
/// are skipped, so compactly supported `F` costs `O(n · support/Δ)`.
pub fn renewal_function<C: Fn(f64) -> f64>(cdf: C, t_max: f64, delta: f64) -> Result<(Vec<f64>, f64)> {
    let n = grid_len(t_max, delta)?;
    let f: Vec<f64> = (0..=n).map(|k| cdf(k as f64 * delta)).collect();
    if f.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0 + 1e-12) || f.windows(2).any(|w| w[1] < w[0] - 1e-15) {
        return Err(Error::param("cdf values must be nondecreasing in [0, 1]"));
    }
    if f[0] > 0.0 {
        return Err(Error::param("interarrival law must put no mass at zero"));
    }
    let df: Vec<(usize, f64)> = (1..=n).map(|j| (j, f[j] - f[j - 1])).filter(|(_, d)| *d != 0.0).collect();
    let surv: Vec<f64> = f.iter().map(|v| 1.0 - v).collect();
    let mu = trapezoid(&surv, delta);
    let m2 = trapezoid(&surv.iter().enumerate().map(|(k, s)| 2.0 * k as f64 * delta * s).collect::<Vec<_>>(), delta);
    if mu <= 0.0 {
        return Err(Error::numerical("interarrival mean vanishes on the grid"));
    }
    let d1 = f[1] - f[0];
    let mut m = vec![0.0; n + 1];
    for i in 1..=n {
        let mut acc = f[i];
        for &(j, d) in &df {
            if j > i {
                break;
            }
            if j == 1 {
                acc += 0.5 * m[i - 1] * d;
            } else {
                acc += 0.5 * (m[i - j] + m[i - j + 1]) * d;
            }
        }
        let v = acc / (1.0 - 0.5 * d1);
        // Lorden: m(t) <= t/μ + E[A²]/μ² − 1, with unit slack.
        let bound = i as f64 * delta / mu + m2 / (mu * mu) + 1.0;
        if !v.is_finite() || v > bound {
            return Err(Error::numerical(format!("renewal function exceeds its linear bound at t = {}", i as f64 * delta)));
        }
        m[i] = v;
    }
    Ok((m, mu))
}

/// Key renewal theorem on a grid: returns `m`, `∫ f(t−s) dm(s)` at `t_max` and
/// `(1/μ) ∫_0^{t_max} f`.
pub fn solve_renewal_equation<C, G>(cdf: C, f: G, t_max: f64, delta: f64) -> Result<RenewalEquationSolution>
where
    C: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (m, mu) = renewal_function(cdf, t_max, delta)?;
    let n = m.len() - 1;
    let fv: Vec<f64> = (0..=n).map(|k| f(k as f64 * delta)).collect();
    if fv.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("f must be finite on the grid"));
    }
    let mut convolution = 0.0;
    for k in 1..=n {
        convolution += 0.5 * (fv[n - k] + fv[n - k + 1]) * (m[k] - m[k - 1]);
    }
    let limit = trapezoid(&fv, delta) / mu;
    Ok(RenewalEquationSolution { delta, m, convolution, limit, mu })
}

/// `P(T_{N(t)} ≤ s) = F̄(t) + ∫_0^s F̄(t − r) dm(r)`.
pub fn last_renewal_cdf<C: Fn(f64) -> f64>(cdf: C, t: f64, s: f64, delta: f64) -> Result<f64> {
    if !(s >= 0.0 && s <= t) {
        return Err(Error::param(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
    }
    let (m, _) = renewal_function(&cdf, t, delta)?;
    let h = t / (m.len() - 1) as f64;
    let surv = |r: f64| 1.0 - cdf(t - r);
    let mut p = surv(0.0);
    let whole = ((s / h).floor() as usize).min(m.len() - 1);
    for k in 1..=whole {
        let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
        p += 0.5 * (surv(a) + surv(b)) * (m[k] - m[k - 1]);
    }
    let rest = s - whole as f64 * h;
    if rest > 0.0 && whole < m.len() - 1 {
        let frac = rest / h;
        let a = whole as f64 * h;
        let dm = frac * (m[whole + 1] - m[whole]);
        p += 0.5 * (surv(a) + surv(s)) * dm;
    }
    Ok(p)
}
