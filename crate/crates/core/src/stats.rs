//! Monte Carlo estimates and the replication harness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::RandomStream;

/// Sample mean with its standard error `sd / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Sum in a fixed binary-tree order, independent of how the input was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

impl EstimateWithCI {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, n: 1 }
    }

    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { value: f64::NAN, stderr: f64::NAN, n: 0 };
        }
        let mean = pairwise_sum(samples) / n as f64;
        if n == 1 {
            return Self { value: mean, stderr: 0.0, n };
        }
        let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        Self {
            value: mean,
            stderr: (var / n as f64).sqrt(),
            n,
        }
    }

    /// `|self - target| <= k * stderr + slack`.
    pub fn within(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr + slack
    }

    /// Standard error of the difference of two estimates, treated as independent.
    pub fn joint_stderr(&self, other: &EstimateWithCI) -> f64 {
        (self.stderr * self.stderr + other.stderr * other.stderr).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
            n: self.n,
        }
    }
}

/// Run `n` replications in parallel; replication `i` receives `base.child(i)`.
/// Output order is the replication order.
pub fn replicate<T, F>(base: &RandomStream, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut RandomStream) -> Result<T> + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut stream = base.child(i as u64);
            f(i, &mut stream)
        })
        .collect()
}

/// Convenience: replicate a scalar statistic and summarise it.
pub fn replicate_mean<F>(base: &RandomStream, n: usize, f: F) -> Result<EstimateWithCI>
where
    F: Fn(usize, &mut RandomStream) -> Result<f64> + Sync + Send,
{
    let xs = replicate(base, n, f)?;
    Ok(EstimateWithCI::from_samples(&xs))
}
