use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde::ScalarField;

/// Natural cubic spline on a uniform grid, extended linearly (which keeps it
/// C²) outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalSpline {
    lo: f64,
    h: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(lo: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 || !(h > 0.0) || !lo.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("spline needs >= 3 finite values and a positive step"));
        }
        // Thomas algorithm for h/6 M_{i-1} + 2h/3 M_i + h/6 M_{i+1} = Δ²y_i / h.
        let m = n - 2;
        let mut diag = vec![4.0; m];
        let mut rhs: Vec<f64> = (1..n - 1).map(|i| 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h)).collect();
        for i in 1..m {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = vec![0.0; n];
        for i in (0..m).rev() {
            let next = if i + 1 < m { second[i + 2] } else { 0.0 };
            second[i + 1] = (rhs[i] - next) / diag[i];
        }
        Ok(Self { lo, h, values, second })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.h * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + self.h * i as f64
    }

    /// `(S, S', S'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.values.len();
        let h = self.h;
        if x < self.lo {
            let (y, d, _) = self.eval(self.lo);
            return (y + d * (x - self.lo), d, 0.0);
        }
        let hi = self.hi();
        if x > hi {
            let (y, d, _) = self.eval(hi);
            return (y + d * (x - hi), d, 0.0);
        }
        let i = (((x - self.lo) / h).floor() as usize).min(n - 2);
        let (xl, xr) = (self.node(i), self.node(i + 1));
        let (a, b) = ((xr - x) / h, (x - xl) / h);
        let (yl, yr, ml, mr) = (self.values[i], self.values[i + 1], self.second[i], self.second[i + 1]);
        let y = a * yl + b * yr + ((a * a * a - a) * ml + (b * b * b - b) * mr) * h * h / 6.0;
        let d = (yr - yl) / h - (3.0 * a * a - 1.0) * h * ml / 6.0 + (3.0 * b * b - 1.0) * h * mr / 6.0;
        let dd = a * ml + b * mr;
        (y, d, dd)
    }
}

/// Candidate value `φ(t, x) = e^{−ρt} ψ(x)` with ψ a natural cubic spline
/// through grid values (`ρ = 0` for a time-homogeneous candidate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateValue {
    pub psi: NaturalSpline,
    pub discount: f64,
}

impl CandidateValue {
    pub fn from_grid(lo: f64, h: f64, values: Vec<f64>, discount: f64) -> Result<Self> {
        if !(discount >= 0.0) {
            return Err(Error::param("discount rate must be nonnegative"));
        }
        Ok(Self { psi: NaturalSpline::new(lo, h, values)?, discount })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.psi.values().len()).map(|i| self.psi.node(i)).collect()
    }

    fn scale(&self, t: f64) -> f64 {
        if self.discount == 0.0 {
            1.0
        } else {
            (-self.discount * t).exp()
        }
    }
}

impl ScalarField for CandidateValue {
    fn value(&self, t: f64, x: f64) -> f64 {
        self.scale(t) * self.psi.eval(x).0
    }

    fn dt(&self, t: f64, x: f64) -> f64 {
        -self.discount * self.value(t, x)
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        self.scale(t) * self.psi.eval(x).1
    }

    fn dxx(&self, t: f64, x: f64) -> f64 {
        self.scale(t) * self.psi.eval(x).2
    }
}

/// The candidate with x-derivatives replaced by central differences of step
/// `h`, i.e. the operator the grid solver discretises.
pub struct GridStencil<'a> {
    pub phi: &'a CandidateValue,
    pub h: f64,
}

impl ScalarField for GridStencil<'_> {
    fn value(&self, t: f64, x: f64) -> f64 {
        self.phi.value(t, x)
    }

    fn dt(&self, t: f64, x: f64) -> f64 {
        self.phi.dt(t, x)
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        (self.phi.value(t, x + self.h) - self.phi.value(t, x - self.h)) / (2.0 * self.h)
    }

    fn dxx(&self, t: f64, x: f64) -> f64 {
        let h = self.h;
        (self.phi.value(t, x + h) - 2.0 * self.phi.value(t, x) + self.phi.value(t, x - h)) / (h * h)
    }
}
