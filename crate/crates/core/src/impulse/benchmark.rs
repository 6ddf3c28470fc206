use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::problem::BenchmarkParams;
use super::value::CandidateValue;
use crate::error::{Error, Result};
use crate::linalg;

pub const MAX_SWEEPS: usize = 200;
pub const RESIDUAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSolution {
    pub value: CandidateValue,
    pub sweeps: usize,
    /// Sup-norm of the discrete QVI residual at termination.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Row {
    Continue,
    Jump(usize),
}

struct Grid {
    p: BenchmarkParams,
    x: Vec<f64>,
    d: usize,
}

impl Grid {
    fn n(&self) -> usize {
        self.x.len()
    }

    /// Nodes whose jump neighbours fall off the grid must intervene.
    fn forced(&self, i: usize) -> bool {
        i < self.d || i + self.d >= self.n()
    }

    fn cost(&self, i: usize, j: usize) -> f64 {
        self.p.c + self.p.kappa * (self.x[j] - self.x[i]).abs()
    }

    /// `(ρ − L₀)ψ − x²` at an interior node.
    fn continuation_defect(&self, psi: &[f64], i: usize) -> f64 {
        let (p, h, d) = (&self.p, self.p.h, self.d);
        let xi = self.x[i];
        let drift = p.a * xi * (psi[i + 1] - psi[i - 1]) / (2.0 * h);
        let diff = 0.5 * p.sigma * p.sigma * (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h * h);
        let jump = p.lambda * (0.5 * psi[i + d] + 0.5 * psi[i - d] - psi[i]);
        p.rho * psi[i] - drift - diff - jump - xi * xi
    }

    /// Cheapest target `j ≠ i`; ties go to the nearer target.
    fn best_target(&self, psi: &[f64], i: usize) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for j in 0..self.n() {
            if j == i {
                continue;
            }
            let v = psi[j] + self.cost(i, j);
            let tie = (v - best.1).abs() <= 1e-14 * v.abs().max(1.0);
            if (v < best.1 && !tie) || (tie && j.abs_diff(i) < best.0.abs_diff(i)) {
                best = (j, v);
            }
        }
        best
    }

    /// Per node: `(continuation defect, ψ − Mψ, target)`.
    fn defects(&self, psi: &[f64]) -> Vec<(f64, f64, usize)> {
        (0..self.n())
            .map(|i| {
                let (j, m) = self.best_target(psi, i);
                let f1 = if self.forced(i) { f64::NEG_INFINITY } else { self.continuation_defect(psi, i) };
                (f1, psi[i] - m, j)
            })
            .collect()
    }

    fn solve_rows(&self, rows: &[Row]) -> Result<Vec<f64>> {
        let n = self.n();
        let (p, h, d) = (&self.p, self.p.h, self.d);
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        let s2 = 0.5 * p.sigma * p.sigma / (h * h);
        for (i, row) in rows.iter().enumerate() {
            match *row {
                Row::Jump(j) => {
                    a[(i, i)] = 1.0;
                    a[(i, j)] -= 1.0;
                    b[i] = self.cost(i, j);
                }
                Row::Continue => {
                    let adv = p.a * self.x[i] / (2.0 * h);
                    a[(i, i)] += p.rho + 2.0 * s2 + p.lambda;
                    a[(i, i + 1)] -= s2 + adv;
                    a[(i, i - 1)] -= s2 - adv;
                    a[(i, i + d)] -= 0.5 * p.lambda;
                    a[(i, i - d)] -= 0.5 * p.lambda;
                    b[i] = self.x[i] * self.x[i];
                }
            }
        }
        Ok(linalg::solve(a, &b)?.iter().copied().collect())
    }
}

/// Policy iteration for `max{(ρ − L₀)ψ − x², ψ − Mψ} = 0` on the uniform grid
/// over `[−L, L]`, where `L₀` is the generator without the time derivative
/// (central differences, jumps landing on nodes) and `Mψ` minimises over grid
/// targets. Each sweep picks the larger branch per node and solves the
/// resulting linear system.
pub fn solve_benchmark_qvi(params: &BenchmarkParams) -> Result<BenchmarkSolution> {
    params.validate()?;
    if params.sigma * params.sigma / params.h < params.a.abs() * params.half_width {
        return Err(Error::param("grid step too coarse for a monotone drift stencil"));
    }
    let n = (2.0 * params.half_width / params.h).round() as usize + 1;
    let x: Vec<f64> = (0..n).map(|i| -params.half_width + i as f64 * params.h).collect();
    let grid = Grid { p: *params, d: (params.delta / params.h).round() as usize, x };
    let mut psi: Vec<f64> = grid.x.iter().map(|x| x * x).collect();
    let mut rows: Option<Vec<Row>> = None;
    for sweep in 0..=MAX_SWEEPS {
        let defects = grid.defects(&psi);
        let residual = defects.iter().map(|&(f1, f2, _)| f1.max(f2).abs()).fold(0.0, f64::max);
        let next: Vec<Row> = defects
            .iter()
            .enumerate()
            .map(|(i, &(f1, f2, j))| {
                let keep_jump = matches!(rows.as_ref().map(|r| r[i]), Some(Row::Jump(_)));
                let margin = 1e-12 * (1.0 + psi[i].abs());
                let jump = grid.forced(i) || f2 > f1 + margin || (keep_jump && f2 >= f1 - margin);
                if jump {
                    Row::Jump(j)
                } else {
                    Row::Continue
                }
            })
            .collect();
        if rows.as_ref() == Some(&next) && residual <= RESIDUAL_TOL {
            return Ok(BenchmarkSolution {
                value: CandidateValue::from_grid(-params.half_width, params.h, psi, params.rho)?,
                sweeps: sweep,
                residual,
            });
        }
        if sweep == MAX_SWEEPS {
            break;
        }
        psi = grid.solve_rows(&next)?;
        rows = Some(next);
    }
    Err(Error::numerical(format!("policy iteration did not converge in {MAX_SWEEPS} sweeps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impulse::{qvi_residual, synthesize_policy, ZSearch};
    use crate::sde::ScalarField;

    fn band(c: f64) -> (f64, f64) {
        let p = BenchmarkParams { c, ..Default::default() };
        let sol = solve_benchmark_qvi(&p).unwrap();
        let problem = p.problem().unwrap();
        let policy = synthesize_policy(&problem, &sol.value, &ZSearch::over(-4.0, 4.0)).unwrap();
        let inner: Vec<_> = policy.continuation.iter().filter(|i| i.contains(0.0)).collect();
        assert_eq!(inner.len(), 1);
        (inner[0].lo.unwrap(), inner[0].hi.unwrap())
    }

    #[test]
    fn symmetric_solution_and_small_residual() {
        let p = BenchmarkParams::default();
        let sol = solve_benchmark_qvi(&p).unwrap();
        let v = sol.value.psi.values();
        let n = v.len();
        for i in 0..n {
            assert!((v[i] - v[n - 1 - i]).abs() < 1e-8 * (1.0 + v[i].abs()), "{i}");
        }
        let problem = p.problem().unwrap();
        let report = qvi_residual(&problem, &sol.value, &ZSearch::over(-4.0, 4.0)).unwrap();
        assert!(report.sup_norm <= 1e-3, "{}", report.sup_norm);
        assert!(report.dichotomy_holds(1e-3));
        let (lo, hi) = band(p.c);
        assert!((lo + hi).abs() < 1e-9);
    }

    #[test]
    fn perturbation_is_detected() {
        let p = BenchmarkParams::default();
        let sol = solve_benchmark_qvi(&p).unwrap();
        let perturbed: Vec<f64> =
            sol.value.nodes().iter().zip(sol.value.psi.values()).map(|(x, v)| v + 0.1 * x.cos()).collect();
        let phi = CandidateValue::from_grid(-4.0, 0.01, perturbed, p.rho).unwrap();
        let report = qvi_residual(&p.problem().unwrap(), &phi, &ZSearch::over(-4.0, 4.0)).unwrap();
        assert!(report.sup_norm > 1e-2, "{}", report.sup_norm);
    }

    #[test]
    fn band_widens_with_fixed_cost() {
        let bands: Vec<_> = [0.5, 1.0, 2.0].iter().map(|&c| band(c)).collect();
        for w in bands.windows(2) {
            assert!(w[1].1 > w[0].1 && w[1].0 < w[0].0, "{bands:?}");
        }
    }

    #[test]
    fn value_is_positive_and_below_never_cost() {
        let p = BenchmarkParams::default();
        let sol = solve_benchmark_qvi(&p).unwrap();
        assert!(sol.value.psi.values().iter().all(|&v| v > 0.0));
        assert!(sol.value.value(0.0, 0.0) > 0.0);
    }

    #[test]
    fn rejects_off_grid_jumps() {
        let p = BenchmarkParams { delta: 0.305, ..Default::default() };
        assert!(matches!(solve_benchmark_qvi(&p), Err(Error::Parameter(_))));
    }
}
