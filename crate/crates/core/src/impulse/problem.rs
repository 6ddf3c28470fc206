use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde::{JumpDiffusionSpec, MarkDistribution};

pub type CostFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type InterventionCostFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// When the cost stops accruing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Stopping {
    /// `τ_S = T`; the terminal cost is charged at `T`.
    Finite { horizon: f64 },
    /// `τ_S = ∞` with discount `ρ` already folded into ℓ and K; simulation
    /// truncates at `truncation` and reports a tail bound.
    Discounted { rate: f64, truncation: f64 },
}

/// `J_u(y) = E[∫ ℓ(s, X_s) ds + g(τ_S, X_{τ_S}) 1{τ_S < ∞} + Σ K(τ_j, X_{τ_j−}, z_j)]`.
#[derive(Clone)]
pub struct ImpulseProblem {
    pub dynamics: JumpDiffusionSpec,
    /// ℓ(t, x) ≥ 0.
    pub running_cost: CostFn,
    /// g(t, x) ≥ 0; ignored for discounted problems.
    pub terminal_cost: CostFn,
    /// K(t, x, z) ≥ `fixed_cost` e^{−ρt}.
    pub intervention_cost: InterventionCostFn,
    pub fixed_cost: f64,
    pub stopping: Stopping,
    /// State span searched by the intervention operator.
    pub domain: (f64, f64),
}

impl fmt::Debug for ImpulseProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImpulseProblem")
            .field("dynamics", &self.dynamics)
            .field("fixed_cost", &self.fixed_cost)
            .field("stopping", &self.stopping)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ImpulseProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.fixed_cost > 0.0) {
            return Err(Error::param("intervention cost needs a strictly positive fixed part"));
        }
        match self.stopping {
            Stopping::Finite { horizon } if !(horizon > 0.0) => return Err(Error::param("horizon must be positive")),
            Stopping::Discounted { rate, truncation } if !(rate > 0.0 && truncation > 0.0) => {
                return Err(Error::param("infinite-horizon problems need ρ > 0 and a positive truncation"))
            }
            _ => {}
        }
        let (lo, hi) = self.domain;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param("domain must be a finite nonempty interval"));
        }
        Ok(())
    }

    pub fn discount(&self) -> f64 {
        match self.stopping {
            Stopping::Discounted { rate, .. } => rate,
            Stopping::Finite { .. } => 0.0,
        }
    }

    pub fn horizon(&self) -> f64 {
        match self.stopping {
            Stopping::Discounted { truncation, .. } => truncation,
            Stopping::Finite { horizon } => horizon,
        }
    }
}

/// One-dimensional jump-linear benchmark:
/// `dX = aX dt + σ dW + ∫ z Ñ(dt, dz)` with marks `±δ` equiprobable at rate λ,
/// `ℓ = e^{−ρt} x²`, `K = e^{−ρt}(c + κ|z|)`, grid `[−L, L]` with step `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkParams {
    pub a: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub delta: f64,
    pub rho: f64,
    pub c: f64,
    pub kappa: f64,
    pub half_width: f64,
    pub h: f64,
    /// Truncation horizon for Monte Carlo cost estimates.
    pub truncation: f64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self { a: 0.25, sigma: 0.5, lambda: 1.0, delta: 0.3, rho: 1.0, c: 0.5, kappa: 0.2, half_width: 4.0, h: 0.01, truncation: 10.0 }
    }
}

impl BenchmarkParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.sigma, self.lambda, self.delta, self.rho, self.c, self.kappa, self.half_width, self.h, self.truncation]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.sigma < 0.0 || self.lambda < 0.0 || self.delta <= 0.0 || self.kappa < 0.0 {
            return Err(Error::param("benchmark parameters must be finite with σ, λ, κ >= 0 and δ > 0"));
        }
        if !(self.rho > 0.0 && self.c > 0.0 && self.h > 0.0 && self.half_width > 0.0 && self.truncation > 0.0) {
            return Err(Error::param("benchmark needs ρ, c, h, L and the truncation horizon positive"));
        }
        let d = self.delta / self.h;
        if (d - d.round()).abs() > 1e-9 || d.round() < 1.0 {
            return Err(Error::param("jump size δ must be a positive multiple of the grid step h"));
        }
        let n = 2.0 * self.half_width / self.h;
        if (n - n.round()).abs() > 1e-9 || n.round() < 4.0 * d.round() + 4.0 {
            return Err(Error::param("grid must divide [−L, L] evenly and be wide relative to δ"));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ImpulseProblem> {
        self.validate()?;
        let mut dynamics = JumpDiffusionSpec::linear(self.a, self.sigma);
        if self.lambda > 0.0 {
            dynamics = dynamics.with_additive_jumps(self.lambda, MarkDistribution::symmetric(self.delta))?.compensated(true);
        }
        let (rho, c, kappa) = (self.rho, self.c, self.kappa);
        Ok(ImpulseProblem {
            dynamics,
            running_cost: Arc::new(move |t, x| (-rho * t).exp() * x * x),
            terminal_cost: Arc::new(|_, _| 0.0),
            intervention_cost: Arc::new(move |t, _x, z| (-rho * t).exp() * (c + kappa * z.abs())),
            fixed_cost: c,
            stopping: Stopping::Discounted { rate: rho, truncation: self.truncation },
            domain: (-self.half_width, self.half_width),
        })
    }
}
