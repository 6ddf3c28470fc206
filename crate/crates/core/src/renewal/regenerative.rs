use serde::{Deserialize, Serialize};

use super::dist::Dist;
use super::process::LimitCheck;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::stats::replicate_mean;

/// One sojourn inside a regeneration cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub state: usize,
    pub duration: Dist,
}

/// A cycle is the fixed sequence of phases; each cycle draws fresh durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegenerativeSpec {
    pub phases: Vec<Phase>,
}

impl RegenerativeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::param("a regeneration cycle needs at least one phase"));
        }
        for p in &self.phases {
            p.duration.validate()?;
            if !p.duration.mean().is_some_and(|m| m.is_finite() && m >= 0.0) {
                return Err(Error::param("phase durations need a finite nonnegative mean"));
            }
        }
        if self.mean_cycle() <= 0.0 {
            return Err(Error::distribution("mean cycle length is zero"));
        }
        Ok(())
    }

    /// `E[A^(0)]`.
    pub fn mean_cycle(&self) -> f64 {
        self.phases.iter().map(|p| p.duration.mean().unwrap_or(f64::INFINITY)).sum()
    }

    /// `E[A_i^(0)]`.
    pub fn mean_occupation(&self, state: usize) -> f64 {
        self.phases.iter().filter(|p| p.state == state).map(|p| p.duration.mean().unwrap_or(f64::INFINITY)).sum()
    }

    /// Draw one cycle as `(state, duration)` sojourns.
    pub fn sample_cycle(&self, rng: &mut RandomStream) -> Result<Vec<(usize, f64)>> {
        self.phases
            .iter()
            .map(|p| {
                let d = p.duration.sample(rng);
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::distribution(format!("sampled sojourn {d} is negative")));
                }
                Ok((p.state, d))
            })
            .collect()
    }
}

/// Fraction of `[0, horizon]` spent in `state` against `E[A_i^(0)] / E[A^(0)]`.
pub fn regenerative_occupancy(
    spec: &RegenerativeSpec,
    state: usize,
    horizon: f64,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<LimitCheck> {
    spec.validate()?;
    if !(horizon.is_finite() && horizon > 0.0) || n_paths < 2 {
        return Err(Error::param("need a positive horizon and at least two replications"));
    }
    let limit = spec.mean_occupation(state) / spec.mean_cycle();
    let estimate = replicate_mean(stream, n_paths, |_, s| {
        let mut rng = s.child(0);
        let (mut clock, mut inside) = (0.0, 0.0);
        while clock < horizon {
            let cycle = spec.sample_cycle(&mut rng)?;
            let len: f64 = cycle.iter().map(|c| c.1).sum();
            if len <= 0.0 {
                return Err(Error::distribution("zero-length regeneration cycle"));
            }
            for (st, d) in cycle {
                let take = d.min(horizon - clock).max(0.0);
                if st == state {
                    inside += take;
                }
                clock += d;
            }
        }
        Ok(inside / horizon)
    })?;
    Ok(LimitCheck { estimate, limit })
}
