use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng::RandomStream;

/// Fixed quadrature order for expectations over continuous mark laws.
pub const QUADRATURE_NODES: usize = 64;

/// Law ν of the jump marks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MarkDistribution {
    /// Finite support with the given probabilities.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
}

impl MarkDistribution {
    pub fn point(value: f64) -> Self {
        MarkDistribution::Discrete { values: vec![value], probs: vec![1.0] }
    }

    /// ±`size` with probability 1/2 each.
    pub fn symmetric(size: f64) -> Self {
        MarkDistribution::Discrete { values: vec![-size, size], probs: vec![0.5, 0.5] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MarkDistribution::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::param("discrete marks need matching non-empty values/probs"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::param("discrete marks must be finite"));
                }
                if probs.iter().any(|p| !(*p >= 0.0)) {
                    return Err(Error::param("mark probabilities must be nonnegative"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::param(format!("mark probabilities sum to {total}")));
                }
                Ok(())
            }
            MarkDistribution::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::param("uniform marks need finite lo < hi"));
                }
                Ok(())
            }
        }
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match self {
            MarkDistribution::Discrete { values, probs } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated non-empty")
            }
            MarkDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(),
        }
    }

    /// `E_ν[g(Z)]`: exact sum for discrete marks, Gauss–Legendre otherwise.
    /// The continuous case is cross-checked against a half-order rule.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        match self {
            MarkDistribution::Discrete { values, probs } => {
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    if *p > 0.0 {
                        acc += p * g(*v);
                    }
                }
                Ok(acc)
            }
            MarkDistribution::Uniform { lo, hi } => {
                let density = 1.0 / (hi - lo);
                let fine = quadrature::integrate(&g, *lo, *hi, QUADRATURE_NODES) * density;
                let coarse = quadrature::integrate(&g, *lo, *hi, QUADRATURE_NODES / 2) * density;
                if !fine.is_finite() || (fine - coarse).abs() > 1e-8 * fine.abs().max(1.0) {
                    return Err(Error::numerical(format!(
                        "mark quadrature did not converge ({fine} vs {coarse})"
                    )));
                }
                Ok(fine)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            MarkDistribution::Discrete { values, probs } => {
                values.iter().zip(probs).map(|(v, p)| v * p).sum()
            }
            MarkDistribution::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

pub type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type JumpCoefficient = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Coefficients of a scalar jump-diffusion.
#[derive(Clone)]
pub struct JumpDiffusionSpec {
    drift: Coefficient,
    diffusion: Coefficient,
    jump_intensity: f64,
    marks: MarkDistribution,
    jump_coefficient: JumpCoefficient,
    compensated: bool,
}

impl fmt::Debug for JumpDiffusionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JumpDiffusionSpec")
            .field("jump_intensity", &self.jump_intensity)
            .field("marks", &self.marks)
            .field("compensated", &self.compensated)
            .finish_non_exhaustive()
    }
}

impl JumpDiffusionSpec {
    /// Pure diffusion `dX = f dt + σ dW`.
    pub fn diffusion<F, S>(drift: F, diffusion: S) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            jump_intensity: 0.0,
            marks: MarkDistribution::point(0.0),
            jump_coefficient: Arc::new(|_, _, z| z),
            compensated: false,
        }
    }

    /// `dX = a X dt + σ dW`.
    pub fn linear(a: f64, sigma: f64) -> Self {
        Self::diffusion(move |_, x| a * x, move |_, _| sigma)
    }

    /// Add jumps of intensity `intensity` with marks `marks` and coefficient ξ.
    pub fn with_jumps<J>(mut self, intensity: f64, marks: MarkDistribution, coefficient: J) -> Result<Self>
    where
        J: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::param(format!("jump intensity must be finite and >= 0, got {intensity}")));
        }
        marks.validate()?;
        self.jump_intensity = intensity;
        self.marks = marks;
        self.jump_coefficient = Arc::new(coefficient);
        Ok(self)
    }

    /// Jumps with ξ(t, x, z) = z.
    pub fn with_additive_jumps(self, intensity: f64, marks: MarkDistribution) -> Result<Self> {
        self.with_jumps(intensity, marks, |_, _, z| z)
    }

    pub fn compensated(mut self, on: bool) -> Self {
        self.compensated = on;
        self
    }

    pub fn drift(&self, t: f64, x: f64) -> f64 {
        (self.drift)(t, x)
    }

    pub fn diffusion_coef(&self, t: f64, x: f64) -> f64 {
        (self.diffusion)(t, x)
    }

    pub fn jump_size(&self, t: f64, x: f64, z: f64) -> f64 {
        (self.jump_coefficient)(t, x, z)
    }

    pub fn jump_intensity(&self) -> f64 {
        self.jump_intensity
    }

    pub fn marks(&self) -> &MarkDistribution {
        &self.marks
    }

    pub fn is_compensated(&self) -> bool {
        self.compensated
    }

    /// `λ E_ν[ξ(t,x,Z)]`, the compensator drift removed when `compensated`.
    pub fn compensator(&self, t: f64, x: f64) -> Result<f64> {
        if self.jump_intensity == 0.0 {
            return Ok(0.0);
        }
        Ok(self.jump_intensity * self.marks.expect(|z| self.jump_size(t, x, z))?)
    }

    /// Drift actually integrated by the Euler scheme.
    pub fn effective_drift(&self, t: f64, x: f64) -> Result<f64> {
        if self.compensated {
            Ok(self.drift(t, x) - self.compensator(t, x)?)
        } else {
            Ok(self.drift(t, x))
        }
    }
}

/// Jump epochs on `(0, horizon]` with exact exponential interarrivals, each
/// paired with an iid mark.
pub fn sample_jump_times(
    stream: &mut RandomStream,
    intensity: f64,
    marks: &MarkDistribution,
    horizon: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::param(format!("jump intensity must be finite and >= 0, got {intensity}")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param(format!("horizon must be positive, got {horizon}")));
    }
    marks.validate()?;
    let mut out = Vec::new();
    if intensity == 0.0 {
        return Ok(out);
    }
    let mut t = 0.0;
    loop {
        t += stream.exponential(intensity);
        if t > horizon {
            break;
        }
        let z = marks.sample(stream);
        out.push((t, z));
    }
    Ok(out)
}
