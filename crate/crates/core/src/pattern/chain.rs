use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::solve;

/// Finite irreducible Markov chain with its stationary law and mean hitting
/// times precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    p: DMatrix<f64>,
    pi: DVector<f64>,
    /// `hit[(x, y)] = μ(x, y)`, with `μ(y, y) = 0`.
    hit: DMatrix<f64>,
}

fn reachable_from(p: &DMatrix<f64>, start: usize) -> Vec<bool> {
    let n = p.nrows();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for y in 0..n {
            if p[(x, y)] > 0.0 && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

fn check_stochastic(p: &DMatrix<f64>) -> Result<()> {
    if p.nrows() == 0 || p.nrows() != p.ncols() {
        return Err(Error::param("transition matrix must be square and nonempty"));
    }
    for (i, row) in p.row_iter().enumerate() {
        if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param(format!("row {i} has a negative or non-finite entry")));
        }
        if (row.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("row {i} sums to {}", row.sum())));
        }
    }
    Ok(())
}

/// `π` from `[Pᵀ − I; 1ᵀ] π = [0; 1]`, with the last balance equation
/// replaced by the normalisation (it is implied by the others).
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    check_stochastic(p)?;
    let n = p.nrows();
    if (0..n).any(|s| reachable_from(p, s).iter().any(|r| !r)) {
        return Err(Error::hypothesis("transition matrix is not irreducible"));
    }
    let mut a = p.transpose() - DMatrix::identity(n, n);
    let mut b = DVector::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    let pi = solve(a, &b).map_err(|e| Error::hypothesis(format!("stationary system: {e}")))?;
    let resid = (p.transpose() * &pi - &pi).amax();
    if resid > 1e-10 || (pi.sum() - 1.0).abs() > 1e-10 {
        return Err(Error::hypothesis("stationary system has no valid solution"));
    }
    Ok(pi)
}

/// `μ(·, y)` from `μ(x, y) = 1 + Σ_{z≠y} P_{xz} μ(z, y)` for `x ≠ y` and `μ(y, y) = 0`.
pub fn mean_hitting_times(p: &DMatrix<f64>, target: usize) -> Result<DVector<f64>> {
    check_stochastic(p)?;
    let n = p.nrows();
    if target >= n {
        return Err(Error::param("target state out of range"));
    }
    let can_reach: Vec<bool> = (0..n).map(|x| reachable_from(p, x)[target]).collect();
    if can_reach.iter().any(|r| !r) {
        return Err(Error::hypothesis(format!("state {target} is not reachable from every state")));
    }
    let others: Vec<usize> = (0..n).filter(|&x| x != target).collect();
    let mut out = DVector::zeros(n);
    if others.is_empty() {
        return Ok(out);
    }
    let k = others.len();
    let a = DMatrix::from_fn(k, k, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - p[(others[i], others[j])]
    });
    let mu = solve(a, &DVector::from_element(k, 1.0))?;
    for (i, &x) in others.iter().enumerate() {
        out[x] = mu[i];
    }
    Ok(out)
}

impl MarkovChain {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        let pi = stationary_distribution(&p)?;
        let n = p.nrows();
        let mut hit = DMatrix::zeros(n, n);
        for y in 0..n {
            hit.set_column(y, &mean_hitting_times(&p, y)?);
        }
        Ok(Self { p, pi, hit })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("transition matrix must be square and nonempty"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Chain whose every row equals `probs` (an iid source).
    pub fn iid(probs: &[f64]) -> Result<Self> {
        Self::from_rows(&vec![probs.to_vec(); probs.len()])
    }

    pub fn states(&self) -> usize {
        self.p.nrows()
    }

    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.p[(x, y)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.pi
    }

    /// `μ(x, y)`; zero on the diagonal.
    pub fn hitting_time(&self, x: usize, y: usize) -> f64 {
        self.hit[(x, y)]
    }

    /// Mean first-passage time counting only steps `n ≥ 1`: `μ(x, y)` off
    /// the diagonal and the mean return time `1/π_y` on it.
    pub fn passage_time(&self, x: usize, y: usize) -> f64 {
        if x == y {
            1.0 / self.pi[y]
        } else {
            self.hit[(x, y)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&m(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15);
        let pi = stationary_distribution(&m(&[&[0.9, 0.1], &[0.5, 0.5]])).unwrap();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-14 && (pi[1] - 1.0 / 6.0).abs() < 1e-14);
        let pi = stationary_distribution(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reducible_chain_is_hypothesis_error() {
        let e = stationary_distribution(&m(&[&[1.0, 0.0], &[0.5, 0.5]])).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
        let e = mean_hitting_times(&m(&[&[0.5, 0.5], &[0.0, 1.0]]), 0).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
        assert!(stationary_distribution(&m(&[&[0.5, 0.6], &[0.5, 0.5]])).is_err());
    }

    #[test]
    fn hitting_time_examples() {
        let p = m(&[&[0.9, 0.1], &[0.5, 0.5]]);
        let mu = mean_hitting_times(&p, 0).unwrap();
        assert_eq!(mu[0], 0.0);
        assert!((mu[1] - 2.0).abs() < 1e-14);
        let c = MarkovChain::iid(&[0.2, 0.3, 0.5]).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let want = if x == y { 0.0 } else { 1.0 / [0.2, 0.3, 0.5][y] };
                assert!((c.hitting_time(x, y) - want).abs() < 1e-12);
                assert!((c.passage_time(x, y) - 1.0 / [0.2, 0.3, 0.5][y]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hitting_times_satisfy_first_step_equations() {
        let c = MarkovChain::from_rows(&[vec![0.1, 0.6, 0.3], vec![0.4, 0.0, 0.6], vec![0.3, 0.3, 0.4]]).unwrap();
        for y in 0..3 {
            for x in (0..3).filter(|&x| x != y) {
                let rhs = 1.0 + (0..3).filter(|&z| z != y).map(|z| c.transition(x, z) * c.hitting_time(z, y)).sum::<f64>();
                assert!((c.hitting_time(x, y) - rhs).abs() < 1e-10);
            }
        }
    }
}
