use serde::{Deserialize, Serialize};

use super::operator::{intervention_operator, ZSearch};
use super::problem::ImpulseProblem;
use super::qvi::Region;
use super::value::CandidateValue;
use crate::error::{Error, Result};
use crate::sde::{ImpulseRule, ScalarField};

/// Open interval; `None` ends are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo.is_none_or(|l| x > l) && self.hi.is_none_or(|h| x < h)
    }
}

/// Continuation set D (a finite union of open intervals) and the impulse map
/// on its complement, stored as intervention targets `x + ζ(x)` at exterior
/// grid nodes and interpolated linearly between adjacent exterior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulsePolicy {
    pub continuation: Vec<Interval>,
    /// `(x, target)` for exterior nodes, sorted by `x`.
    pub targets: Vec<(f64, f64)>,
    /// Grid step of the exterior nodes (adjacency test).
    pub step: f64,
}

impl ImpulsePolicy {
    /// D = ℝ: never intervene.
    pub fn never() -> Self {
        Self { continuation: vec![Interval { lo: None, hi: None }], targets: Vec::new(), step: 1.0 }
    }

    pub fn in_continuation(&self, x: f64) -> bool {
        self.continuation.iter().any(|i| i.contains(x))
    }

    /// Target state for an exterior point.
    pub fn target(&self, x: f64) -> Option<f64> {
        let t = &self.targets;
        if t.is_empty() {
            return None;
        }
        let k = t.partition_point(|p| p.0 <= x);
        if k == 0 {
            return Some(t[0].1);
        }
        if k == t.len() {
            return Some(t[k - 1].1);
        }
        let (l, r) = (t[k - 1], t[k]);
        if r.0 - l.0 <= 1.5 * self.step {
            let w = (x - l.0) / (r.0 - l.0);
            Some(l.1 + w * (r.1 - l.1))
        } else if x - l.0 <= r.0 - x {
            Some(l.1)
        } else {
            Some(r.1)
        }
    }

    /// ζ(x) for `x ∉ D`, `None` inside D.
    pub fn impulse_at(&self, x: f64) -> Option<f64> {
        if self.in_continuation(x) {
            None
        } else {
            self.target(x).map(|y| y - x)
        }
    }

    /// Every finite end of D moved outward by `by` (inward for negative
    /// values); targets unchanged.
    pub fn widened(&self, by: f64) -> Result<Self> {
        let mut p = self.clone();
        for i in &mut p.continuation {
            i.lo = i.lo.map(|l| l - by);
            i.hi = i.hi.map(|h| h + by);
            if let (Some(l), Some(h)) = (i.lo, i.hi) {
                if l >= h {
                    return Err(Error::DegeneratePolicy("narrowing removed an interval".into()));
                }
            }
        }
        p.check_targets()?;
        Ok(p)
    }

    /// All targets shifted by `dz`.
    pub fn shifted_targets(&self, dz: f64) -> Result<Self> {
        let mut p = self.clone();
        for t in &mut p.targets {
            t.1 += dz;
        }
        p.check_targets()?;
        Ok(p)
    }

    /// Targets must lie strictly inside D.
    pub fn check_targets(&self) -> Result<()> {
        match self.targets.iter().find(|t| !self.in_continuation(t.1)) {
            Some(t) => Err(Error::DegeneratePolicy(format!("target {} of exterior point {} is not inside D", t.1, t.0))),
            None => Ok(()),
        }
    }
}

impl ImpulseRule for ImpulsePolicy {
    fn impulse(&self, _t: f64, x: f64) -> Option<f64> {
        self.impulse_at(x)
    }
}

/// Construct D = {φ < Mφ} at `t = 0` as the runs of continuation nodes (ends
/// placed midway between a continuation node and its action neighbour) and
/// ζ from the intervention operator at every action node.
pub fn synthesize_policy(problem: &ImpulseProblem, phi: &CandidateValue, search: &ZSearch) -> Result<ImpulsePolicy> {
    let x = phi.nodes();
    let h = phi.psi.step();
    let mut region = Vec::with_capacity(x.len());
    let mut zeta = Vec::with_capacity(x.len());
    for &xi in &x {
        let m = intervention_operator(phi, &*problem.intervention_cost, 0.0, xi, search)?;
        region.push(Region::classify(phi.value(0.0, xi) - m.value));
        zeta.push(m.z);
    }
    let mut continuation = Vec::new();
    let mut i = 0;
    while i < x.len() {
        if region[i] == Region::Action {
            i += 1;
            continue;
        }
        let start = i;
        while i < x.len() && region[i] == Region::Continuation {
            i += 1;
        }
        let lo = (start > 0).then(|| x[start] - 0.5 * h);
        let hi = (i < x.len()).then(|| x[i - 1] + 0.5 * h);
        continuation.push(Interval { lo, hi });
    }
    if continuation.is_empty() {
        return Err(Error::DegeneratePolicy("continuation region is empty".into()));
    }
    let targets = x.iter().zip(&region).zip(&zeta).filter(|((_, r), _)| **r == Region::Action).map(|((xi, _), z)| (*xi, xi + z)).collect();
    let policy = ImpulsePolicy { continuation, targets, step: h };
    policy.check_targets()?;
    Ok(policy)
}
