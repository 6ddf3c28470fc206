//! Impulse control of a one-dimensional jump diffusion.
//!
//! A candidate value `φ(t, x) = e^{−ρt} ψ(x)` is checked against the
//! quasi-variational inequality `max{−(Lφ + ℓ), φ − Mφ} = 0`, where `L` is
//! the generator of the uncontrolled dynamics and
//! `Mφ(t, x) = inf_z φ(t, x + z) + K(t, x, z)`. The continuation region is
//! `D = {φ < Mφ}`; the synthesized policy waits while the state is in `D` and,
//! on leaving it, applies the minimising impulse, which lands back in `D`.
//!
//! Monte Carlo verification compares `φ(y0)` with the simulated cost of the
//! synthesized policy and of perturbed alternatives. The equality part relies
//! on uniform integrability of the discounted value along controlled paths.
//! That is not checked symbolically; it is assumed, and the reported tail
//! bound beyond the truncation horizon is the numerical evidence for it.

mod benchmark;
mod control;
mod operator;
mod policy;
mod problem;
mod qvi;
mod value;

pub use benchmark::{solve_benchmark_qvi, BenchmarkSolution, MAX_SWEEPS, RESIDUAL_TOL};
pub use control::{
    estimate_cost, perturbed_policies, simulate_controlled, verify_value, CostEstimate, VerificationReport, VerificationRow, VerifyOptions,
    DEFAULT_ALLOWANCE, MAX_INTERVENTIONS,
};
pub use operator::{intervention_operator, Intervention, ZSearch};
pub use policy::{synthesize_policy, ImpulsePolicy, Interval};
pub use problem::{BenchmarkParams, CostFn, ImpulseProblem, InterventionCostFn, Stopping};
pub use qvi::{qvi_residual, QVIReport, Region, ACTION_TOL, RESIDUAL_FORM};
pub use value::{CandidateValue, GridStencil, NaturalSpline};
