use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::stats::{replicate, EstimateWithCI};

use super::field::ScalarField;
use super::path::SamplePath;
use super::simulate::{run_path, NoControl, PathSink, StepNode};
use super::spec::JumpDiffusionSpec;

/// Infinitesimal generator including the jump integral:
///
/// `∂_t F + f ∂_x F + ½σ² ∂_x² F + λ E_ν[F(t, x+ξ) − F(t, x) − 1{compensated} ∂_x F ξ]`.
pub fn generator_apply<F: ScalarField + ?Sized>(
    spec: &JumpDiffusionSpec,
    field: &F,
    t: f64,
    x: f64,
) -> Result<f64> {
    let sigma = spec.diffusion_coef(t, x);
    let fx = field.dx(t, x);
    let mut out = field.dt(t, x) + spec.drift(t, x) * fx + 0.5 * sigma * sigma * field.dxx(t, x);
    let lambda = spec.jump_intensity();
    if lambda > 0.0 {
        let base = field.value(t, x);
        let comp = if spec.is_compensated() { 1.0 } else { 0.0 };
        let jump = spec.marks().expect(|z| {
            let xi = spec.jump_size(t, x, z);
            field.value(t, x + xi) - base - comp * fx * xi
        })?;
        out += lambda * jump;
    }
    if !out.is_finite() {
        return Err(Error::numerical(format!("generator is not finite at (t, x) = ({t}, {x})")));
    }
    Ok(out)
}

/// `F(t_K, x(t_K)) − F(t_0, x(t_0−))` minus the discretised Itô expansion:
/// left-point continuous terms on the path grid (with `d[X,X]^c ≈ σ² Δt`)
/// plus the exact jump and intervention increments at their nodes.
pub fn ito_residual<F: ScalarField + ?Sized>(spec: &JumpDiffusionSpec, field: &F, path: &SamplePath) -> f64 {
    if path.is_empty() {
        return 0.0;
    }
    let n = path.len();
    let mut expansion = 0.0;
    for k in 0..n {
        let tk = path.times[k];
        if k > 0 {
            let (t, x) = (path.times[k - 1], path.states[k - 1]);
            let h = tk - t;
            let sigma = spec.diffusion_coef(t, x);
            expansion += field.dt(t, x) * h
                + field.dx(t, x) * (path.pre_states[k] - x)
                + 0.5 * field.dxx(t, x) * sigma * sigma * h;
        }
        if path.states[k] != path.pre_states[k] {
            expansion += field.value(tk, path.states[k]) - field.value(tk, path.pre_states[k]);
        }
    }
    let total = field.value(path.times[n - 1], path.states[n - 1]) - field.value(path.times[0], path.pre_states[0]);
    total - expansion
}

struct DynkinSink<'a, F: ?Sized> {
    spec: &'a JumpDiffusionSpec,
    field: &'a F,
    integral: f64,
    last: (f64, f64),
    error: Option<Error>,
}

impl<F: ScalarField + ?Sized> PathSink for DynkinSink<'_, F> {
    fn node(&mut self, prev: Option<(f64, f64)>, node: &StepNode) {
        if let Some((t, x)) = prev {
            if self.error.is_none() {
                match generator_apply(self.spec, self.field, t, x) {
                    Ok(g) => self.integral += g * (node.t - t),
                    Err(e) => self.error = Some(e),
                }
            }
        }
        self.last = (node.t, node.x);
    }
}

/// Monte Carlo estimate of `E[F(X_t)] − F(x0) − E[∫_0^t LF(s, X_s) ds]`
/// (left-point quadrature on each path's grid).
pub fn dynkin_residual<F: ScalarField + ?Sized>(
    spec: &JumpDiffusionSpec,
    field: &F,
    x0: f64,
    t: f64,
    dt: f64,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<EstimateWithCI> {
    if n_paths < 2 {
        return Err(Error::param("dynkin_residual needs at least two paths"));
    }
    let f0 = field.value(0.0, x0);
    let samples = replicate(stream, n_paths, |_, s| {
        let mut sink = DynkinSink { spec, field, integral: 0.0, last: (0.0, x0), error: None };
        run_path(spec, x0, 0.0, t, dt, s, &NoControl, usize::MAX, &mut sink)?;
        if let Some(e) = sink.error {
            return Err(e);
        }
        let (tf, xf) = sink.last;
        Ok(field.value(tf, xf) - f0 - sink.integral)
    })?;
    Ok(EstimateWithCI::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::sde::{simulate_jump_diffusion, FnField, MarkDistribution, Polynomial};

    #[test]
    fn generator_of_constant_is_zero() {
        let spec = JumpDiffusionSpec::linear(0.7, 0.4)
            .with_additive_jumps(2.0, MarkDistribution::Uniform { lo: -1.0, hi: 2.0 })
            .unwrap()
            .compensated(true);
        let c = Polynomial::new(vec![3.0]);
        assert_eq!(generator_apply(&spec, &c, 0.0, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn generator_of_square_for_linear_diffusion() {
        let (a, sigma) = (-0.8, 0.6);
        let spec = JumpDiffusionSpec::linear(a, sigma);
        let f = Polynomial::monomial(2);
        for x in [-2.0, 0.0, 0.5, 3.0] {
            let expected = 2.0 * a * x * x + sigma * sigma;
            assert!((generator_apply(&spec, &f, 0.0, x).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_adds_second_mark_moment_for_uncompensated_jumps() {
        let (a, sigma, lambda) = (0.3, 0.5, 1.7);
        let spec = JumpDiffusionSpec::linear(a, sigma)
            .with_additive_jumps(lambda, MarkDistribution::symmetric(1.0))
            .unwrap();
        let f = Polynomial::monomial(2);
        for x in [-1.0, 0.25, 2.0] {
            let expected = 2.0 * a * x * x + sigma * sigma + lambda;
            assert!((generator_apply(&spec, &f, 0.0, x).unwrap() - expected).abs() < 1e-12);
        }
        // Finite-difference field gives the same answer to FD accuracy.
        let fd = FnField(|_t, x: f64| x * x);
        let x = 0.25;
        let expected = 2.0 * a * x * x + sigma * sigma + lambda;
        assert!((generator_apply(&spec, &fd, 0.0, x).unwrap() - expected).abs() < 1e-5);
    }

    #[test]
    fn ito_residual_vanishes_for_linear_field() {
        let spec = JumpDiffusionSpec::linear(0.4, 0.9)
            .with_additive_jumps(3.0, MarkDistribution::Uniform { lo: -0.5, hi: 1.0 })
            .unwrap()
            .compensated(true);
        let f = Polynomial::monomial(1);
        for dt in [1e-1, 1e-2, 1e-3] {
            let p = simulate_jump_diffusion(&spec, 0.2, 2.0, dt, &derive_stream(5, 0)).unwrap();
            assert!(ito_residual(&spec, &f, &p).abs() < 1e-12);
        }
    }

    #[test]
    fn ito_residual_vanishes_for_pure_jump_paths() {
        let spec = JumpDiffusionSpec::linear(0.0, 0.0)
            .with_additive_jumps(4.0, MarkDistribution::Uniform { lo: -1.0, hi: 1.0 })
            .unwrap();
        let f = Polynomial::new(vec![0.1, 0.0, -1.0, 0.0, 0.3]);
        let p = simulate_jump_diffusion(&spec, 0.5, 5.0, 0.1, &derive_stream(8, 0)).unwrap();
        assert!(!p.jumps.is_empty());
        assert!(ito_residual(&spec, &f, &p).abs() < 1e-12);
    }

    #[test]
    fn ito_residual_is_first_order_for_deterministic_drift() {
        let spec = JumpDiffusionSpec::linear(0.5, 0.0);
        let f = Polynomial::monomial(2);
        let r: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&dt| {
                let p = simulate_jump_diffusion(&spec, 1.0, 1.0, dt, &derive_stream(0, 0)).unwrap();
                ito_residual(&spec, &f, &p).abs()
            })
            .collect();
        assert!((r[0] / r[1] - 10.0).abs() < 0.5 && (r[1] / r[2] - 10.0).abs() < 0.5, "{r:?}");
    }

    #[test]
    fn dynkin_martingale_for_compensated_jumps() {
        let spec = JumpDiffusionSpec::linear(0.0, 0.5)
            .with_additive_jumps(2.0, MarkDistribution::Discrete { values: vec![-1.0, 2.0], probs: vec![0.5, 0.5] })
            .unwrap()
            .compensated(true);
        let f = Polynomial::monomial(1);
        let e = dynkin_residual(&spec, &f, 0.0, 1.0, 1e-2, 4000, &derive_stream(1, 0)).unwrap();
        assert!(e.within(0.0, 3.0, 0.0), "{e:?}");
    }

    #[test]
    fn dynkin_needs_two_paths() {
        let spec = JumpDiffusionSpec::linear(0.0, 1.0);
        let f = Polynomial::monomial(1);
        assert!(dynkin_residual(&spec, &f, 0.0, 1.0, 0.1, 1, &derive_stream(1, 0)).is_err());
    }
}
