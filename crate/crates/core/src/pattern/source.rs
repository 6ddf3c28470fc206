use super::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Symbol source: iid draws, or a Markov chain observed from `X_0 = initial`
/// (`X_0` itself is not part of the observed stream).
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Iid(Vec<f64>),
    Markov { chain: MarkovChain, initial: usize },
}

impl Source {
    pub fn iid(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs)?;
        Ok(Source::Iid(probs))
    }

    /// Binary source with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::iid(vec![1.0 - p, p])
    }

    pub fn markov(chain: MarkovChain, initial: usize) -> Result<Self> {
        if initial >= chain.states() {
            return Err(Error::param("initial state out of range"));
        }
        Ok(Source::Markov { chain, initial })
    }

    pub fn alphabet(&self) -> usize {
        match self {
            Source::Iid(p) => p.len(),
            Source::Markov { chain, .. } => chain.states(),
        }
    }

    /// Number of memory lanes an automaton over this source needs.
    pub fn lanes(&self) -> usize {
        match self {
            Source::Iid(_) => 1,
            Source::Markov { chain, .. } => chain.states(),
        }
    }

    pub fn initial_lane(&self) -> usize {
        match self {
            Source::Iid(_) => 0,
            Source::Markov { initial, .. } => *initial,
        }
    }

    /// Lane after emitting `symbol`.
    pub fn lane_after(&self, symbol: usize) -> usize {
        match self {
            Source::Iid(_) => 0,
            Source::Markov { .. } => symbol,
        }
    }

    /// `P(next = symbol | lane)`.
    pub fn prob(&self, lane: usize, symbol: usize) -> f64 {
        match self {
            Source::Iid(p) => p[symbol],
            Source::Markov { chain, .. } => chain.transition(lane, symbol),
        }
    }

    pub(crate) fn sampler(&self) -> Sampler {
        let lanes = self.lanes();
        let k = self.alphabet();
        let cumulative = (0..lanes)
            .map(|l| {
                let mut acc = 0.0;
                (0..k)
                    .map(|s| {
                        acc += self.prob(l, s);
                        acc
                    })
                    .collect()
            })
            .collect();
        Sampler { cumulative, markov: matches!(self, Source::Markov { .. }) }
    }
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::param("symbol probabilities must be nonnegative and sum to 1"));
    }
    Ok(())
}

/// Inverse-cdf symbol sampler, one table per lane.
pub(crate) struct Sampler {
    cumulative: Vec<Vec<f64>>,
    markov: bool,
}

impl Sampler {
    #[inline]
    pub(crate) fn draw(&self, lane: usize, rng: &mut RandomStream) -> (usize, usize) {
        let row = &self.cumulative[lane];
        let u = rng.uniform();
        let last = row.len() - 1;
        let s = row[..last].iter().position(|&c| u < c).unwrap_or(last);
        (s, if self.markov { s } else { 0 })
    }
}
