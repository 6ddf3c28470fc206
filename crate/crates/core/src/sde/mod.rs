//! Jump-diffusion simulation and the Itô / generator / Dynkin toolkit.
//!
//! The model is the scalar Lévy SDE
//!
//! ```text
//! dX = f(t,X) dt + σ(t,X) dW + ∫ ξ(t,X(t-),z) N(dt,dz)        (compensated = false)
//! dX = f(t,X) dt + σ(t,X) dW + ∫ ξ(t,X(t-),z) Ñ(dt,dz)        (compensated = true)
//! ```
//!
//! with a finite jump intensity λ and a mark law ν of bounded support or
//! finite discrete support, so `N` has intensity `λ dt ν(dz)`.

mod field;
mod ito;
mod path;
mod simulate;
mod spec;

pub use field::{FnField, Polynomial, ScalarField};
pub use ito::{dynkin_residual, generator_apply, ito_residual};
pub use path::{InterventionRecord, JumpRecord, SamplePath};
pub use simulate::{simulate_jump_diffusion, BLOWUP_THRESHOLD};
pub(crate) use simulate::{record_path, run_path, ImpulseRule, PathSink, StepNode};
pub use spec::{sample_jump_times, JumpDiffusionSpec, MarkDistribution, QUADRATURE_NODES};
