//! Test functions `F(t, x)` for the Itô formula and the generator.

/// A `C^{1,2}` function of `(t, x)`.
///
/// Derivatives default to central differences with step
/// `1e-5 · max(1, |·|)`; implementors with closed forms override them.
pub trait ScalarField: Sync {
    fn value(&self, t: f64, x: f64) -> f64;

    fn dt(&self, t: f64, x: f64) -> f64 {
        let h = 1e-5 * t.abs().max(1.0);
        (self.value(t + h, x) - self.value(t - h, x)) / (2.0 * h)
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        let h = 1e-5 * x.abs().max(1.0);
        (self.value(t, x + h) - self.value(t, x - h)) / (2.0 * h)
    }

    fn dxx(&self, t: f64, x: f64) -> f64 {
        let h = 1e-5 * x.abs().max(1.0);
        (self.value(t, x + h) - 2.0 * self.value(t, x) + self.value(t, x - h)) / (h * h)
    }
}

/// Time-independent polynomial `Σ c_k x^k` with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Coefficients in increasing degree.
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[degree] = 1.0;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn eval(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }
}

impl ScalarField for Polynomial {
    fn value(&self, _t: f64, x: f64) -> f64 {
        Self::eval(&self.coeffs, x)
    }

    fn dt(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }

    fn dx(&self, _t: f64, x: f64) -> f64 {
        self.derivative().value(0.0, x)
    }

    fn dxx(&self, _t: f64, x: f64) -> f64 {
        self.derivative().derivative().value(0.0, x)
    }
}

/// Closure-backed field whose derivatives use finite differences.
pub struct FnField<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> ScalarField for FnField<F> {
    fn value(&self, t: f64, x: f64) -> f64 {
        (self.0)(t, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Analytic;

    impl ScalarField for Analytic {
        fn value(&self, t: f64, x: f64) -> f64 {
            (-0.5 * t).exp() * x.sin()
        }
        fn dt(&self, t: f64, x: f64) -> f64 {
            -0.5 * self.value(t, x)
        }
        fn dx(&self, t: f64, x: f64) -> f64 {
            (-0.5 * t).exp() * x.cos()
        }
        fn dxx(&self, t: f64, x: f64) -> f64 {
            -self.value(t, x)
        }
    }

    #[test]
    fn finite_differences_match_analytic_derivatives() {
        let fd = FnField(|t: f64, x: f64| (-0.5 * t).exp() * x.sin());
        for &(t, x) in &[(0.0, 0.3), (1.2, -2.0), (3.0, 5.5)] {
            assert!((fd.dt(t, x) - Analytic.dt(t, x)).abs() < 1e-8);
            assert!((fd.dx(t, x) - Analytic.dx(t, x)).abs() < 1e-8);
            assert!((fd.dxx(t, x) - Analytic.dxx(t, x)).abs() < 1e-4);
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.5, 3.0]);
        let fd = FnField(|t, x| p.value(t, x));
        for x in [-1.5, 0.0, 0.7, 2.0] {
            assert!((p.dx(0.0, x) - fd.dx(0.0, x)).abs() < 1e-7);
            assert!((p.dxx(0.0, x) - fd.dxx(0.0, x)).abs() < 1e-3);
        }
        assert_eq!(p.value(0.0, 2.0), 1.0 - 4.0 + 2.0 + 24.0);
    }
}
