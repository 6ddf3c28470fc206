use serde::{Deserialize, Serialize};

use super::chain::MarkovChain;
use super::source::check_probs;
use super::word::{overlap_size, Pattern};
use crate::error::{Error, Result};

/// How closed forms treat patterns whose border itself has a border.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    /// Only patterns with no overlap, or whose overlap prefix has none.
    #[default]
    Strict,
    /// Apply the overlap step to the border recursively:
    /// `E[T_A] = 1/π(A) + E[T_{border(A)}]`.
    Iterated,
}

fn check_hypothesis(pattern: &Pattern, mode: OverlapMode) -> Result<()> {
    let k = overlap_size(pattern);
    if mode == OverlapMode::Strict && k > 0 && overlap_size(&pattern.prefix(k)) > 0 {
        return Err(Error::hypothesis(format!(
            "the overlap prefix of length {k} overlaps itself; use the automaton oracle"
        )));
    }
    Ok(())
}

/// Border lengths `m = k_0 > k_1 > … > k_r > 0` visited by the recursion.
fn border_chain(pattern: &Pattern, mode: OverlapMode) -> Vec<usize> {
    let mut out = vec![pattern.len()];
    let mut k = overlap_size(pattern);
    while k > 0 {
        out.push(k);
        if mode == OverlapMode::Strict {
            break;
        }
        k = overlap_size(&pattern.prefix(k));
    }
    out
}

/// Expected waiting time for `pattern` in an iid stream:
/// `1/Π p_{x_i}`, plus `1/Π_{i≤k} p_{x_i}` for an overlap of size `k`.
pub fn expected_time_iid(pattern: &Pattern, probs: &[f64]) -> Result<f64> {
    expected_time_iid_with(pattern, probs, OverlapMode::Strict)
}

pub fn expected_time_iid_with(pattern: &Pattern, probs: &[f64], mode: OverlapMode) -> Result<f64> {
    check_probs(probs)?;
    pattern.check_alphabet(probs.len())?;
    check_hypothesis(pattern, mode)?;
    let mut total = 0.0;
    for k in border_chain(pattern, mode) {
        let pa: f64 = pattern.symbols()[..k].iter().map(|&s| probs[s]).product();
        if pa == 0.0 {
            return Err(Error::hypothesis("pattern has probability zero"));
        }
        total += 1.0 / pa;
    }
    Ok(total)
}

/// Stationary probability of seeing the first `k` symbols of `pattern`.
fn stationary_word_prob(pattern: &Pattern, k: usize, chain: &MarkovChain) -> f64 {
    let s = pattern.symbols();
    let mut p = chain.stationary()[s[0]];
    for w in s[..k].windows(2) {
        p *= chain.transition(w[0], w[1]);
    }
    p
}

/// Expected waiting time for `pattern` in a Markov stream observed after
/// `X_0 = x0`:
///
/// `1/(π_{x_1} Π P_{x_i x_{i+1}})` (+ the same for the overlap prefix)
/// `+ μ⁺(x0, x_1) − μ⁺(x_m, x_1)`,
///
/// where `μ⁺` counts steps `n ≥ 1`, so `μ⁺(y, y) = 1/π_y`.
pub fn expected_time_markov(pattern: &Pattern, chain: &MarkovChain, x0: usize) -> Result<f64> {
    expected_time_markov_with(pattern, chain, x0, OverlapMode::Strict)
}

pub fn expected_time_markov_with(pattern: &Pattern, chain: &MarkovChain, x0: usize, mode: OverlapMode) -> Result<f64> {
    pattern.check_alphabet(chain.states())?;
    if x0 >= chain.states() {
        return Err(Error::param("initial state out of range"));
    }
    check_hypothesis(pattern, mode)?;
    let mut total = 0.0;
    for k in border_chain(pattern, mode) {
        let pa = stationary_word_prob(pattern, k, chain);
        if pa == 0.0 {
            return Err(Error::hypothesis("pattern has probability zero under the chain"));
        }
        total += 1.0 / pa;
    }
    let (x1, xm) = (pattern.first(), pattern.last());
    Ok(total + chain.passage_time(x0, x1) - chain.passage_time(xm, x1))
}
