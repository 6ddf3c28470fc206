use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Univariate law used for interarrival times, delays, rewards, cycle phases
/// and random-walk steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Dist {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Deterministic { value: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    Normal { mean: f64, sd: f64 },
    /// Pareto with `P(X > x) = (scale / x)^shape` for `x >= scale`.
    Pareto { scale: f64, shape: f64 },
}

impl Dist {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Dist::Exponential { rate } => rate.is_finite() && *rate > 0.0,
            Dist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Dist::Deterministic { value } => value.is_finite(),
            Dist::Discrete { values, probs } => {
                !values.is_empty()
                    && values.len() == probs.len()
                    && values.iter().all(|v| v.is_finite())
                    && probs.iter().all(|p| p.is_finite() && *p >= 0.0)
                    && (probs.iter().sum::<f64>() - 1.0).abs() < 1e-9
            }
            Dist::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && *sd >= 0.0,
            Dist::Pareto { scale, shape } => scale.is_finite() && *scale > 0.0 && shape.is_finite() && *shape > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("invalid distribution {self:?}")))
        }
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match self {
            Dist::Exponential { rate } => rng.exponential(*rate),
            Dist::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform_open0(),
            Dist::Deterministic { value } => *value,
            Dist::Discrete { values, probs } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
            Dist::Normal { mean, sd } => mean + sd * rng.standard_normal(),
            Dist::Pareto { scale, shape } => scale * rng.uniform_open0().powf(-1.0 / shape),
        }
    }

    /// `E[X]`, or `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match self {
            Dist::Exponential { rate } => Some(1.0 / rate),
            Dist::Uniform { lo, hi } => Some(0.5 * (lo + hi)),
            Dist::Deterministic { value } => Some(*value),
            Dist::Discrete { values, probs } => Some(values.iter().zip(probs).map(|(v, p)| v * p).sum()),
            Dist::Normal { mean, .. } => Some(*mean),
            Dist::Pareto { scale, shape } => (*shape > 1.0).then(|| shape * scale / (shape - 1.0)),
        }
    }

    /// `E[X^2]`, or `None` when infinite.
    pub fn second_moment(&self) -> Option<f64> {
        match self {
            Dist::Exponential { rate } => Some(2.0 / (rate * rate)),
            Dist::Uniform { lo, hi } => Some((lo * lo + lo * hi + hi * hi) / 3.0),
            Dist::Deterministic { value } => Some(value * value),
            Dist::Discrete { values, probs } => Some(values.iter().zip(probs).map(|(v, p)| v * v * p).sum()),
            Dist::Normal { mean, sd } => Some(mean * mean + sd * sd),
            Dist::Pareto { scale, shape } => (*shape > 2.0).then(|| shape * scale * scale / (shape - 2.0)),
        }
    }

    /// `P(X <= x)`. Unavailable for the normal law.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Dist::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Dist::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Dist::Deterministic { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            Dist::Discrete { values, probs } => {
                values.iter().zip(probs).filter(|(v, _)| **v <= x).map(|(_, p)| p).sum::<f64>().min(1.0)
            }
            Dist::Pareto { scale, shape } => {
                if x <= *scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(*shape)
                }
            }
            Dist::Normal { .. } => return Err(Error::param("cdf of the normal law is not provided")),
        })
    }

    /// Points of positive mass, for laws that have only those.
    pub fn atoms(&self) -> Option<Vec<f64>> {
        match self {
            Dist::Deterministic { value } => Some(vec![*value]),
            Dist::Discrete { values, probs } => {
                Some(values.iter().zip(probs).filter(|(_, p)| **p > 0.0).map(|(v, _)| *v).collect())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::stats::EstimateWithCI;

    fn laws() -> Vec<Dist> {
        vec![
            Dist::Exponential { rate: 2.0 },
            Dist::Uniform { lo: 0.5, hi: 1.5 },
            Dist::Deterministic { value: 1.25 },
            Dist::Discrete { values: vec![1.0, 2.0, 4.0], probs: vec![0.2, 0.5, 0.3] },
            Dist::Normal { mean: 1.0, sd: 0.5 },
            Dist::Pareto { scale: 1.0, shape: 3.5 },
        ]
    }

    #[test]
    fn sample_moments_match_closed_forms() {
        for (k, d) in laws().into_iter().enumerate() {
            d.validate().unwrap();
            let mut rng = derive_stream(11, k as u64);
            let xs: Vec<f64> = (0..200_000).map(|_| d.sample(&mut rng)).collect();
            let e = EstimateWithCI::from_samples(&xs);
            assert!(e.within(d.mean().unwrap(), 4.0, 1e-12), "{d:?}: {e:?}");
            let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
            let e2 = EstimateWithCI::from_samples(&sq);
            assert!(e2.within(d.second_moment().unwrap(), 4.0, 1e-12), "{d:?}: {e2:?}");
        }
    }

    #[test]
    fn heavy_tails_report_infinite_moments() {
        let d = Dist::Pareto { scale: 1.0, shape: 1.5 };
        assert!(d.mean().is_some());
        assert!(d.second_moment().is_none());
        assert!(Dist::Pareto { scale: 1.0, shape: 1.0 }.mean().is_none());
    }

    #[test]
    fn cdf_endpoints() {
        for d in laws().into_iter().filter(|d| !matches!(d, Dist::Normal { .. })) {
            assert_eq!(d.cdf(-1.0).unwrap(), 0.0);
            assert!((d.cdf(1e6).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(Dist::Normal { mean: 0.0, sd: 1.0 }.cdf(0.0).is_err());
    }

    #[test]
    fn invalid_laws_rejected() {
        assert!(Dist::Exponential { rate: 0.0 }.validate().is_err());
        assert!(Dist::Uniform { lo: 1.0, hi: 1.0 }.validate().is_err());
        assert!(Dist::Discrete { values: vec![1.0], probs: vec![0.5] }.validate().is_err());
    }
}
