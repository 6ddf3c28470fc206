use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::automaton::{absorb, automaton_expected_time, conditional_expected_time, Automaton, AutomatonStart};
use super::source::Source;
use super::word::Pattern;
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::rng::RandomStream;
use crate::stats::{replicate, EstimateWithCI};

/// Which pattern wins a race and how long the race lasts on average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaceResult {
    pub probabilities: Vec<f64>,
    pub expected_min_time: f64,
}

impl RaceResult {
    fn check(self, expected_times: &[f64]) -> Result<Self> {
        let sum: f64 = self.probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-10 || self.probabilities.iter().any(|p| !(-1e-10..=1.0 + 1e-10).contains(p)) {
            return Err(Error::numerical(format!("race probabilities {:?} are not a distribution", self.probabilities)));
        }
        let min = expected_times.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.expected_min_time > min * (1.0 + 1e-10) {
            return Err(Error::numerical("expected race length exceeds a single pattern's waiting time"));
        }
        Ok(self)
    }
}

/// `P_1 = (E[T_2] + E[T_{1|2}] − E[T_1]) / (E[T_{1|2}] + E[T_{2|1}])`.
pub fn two_pattern_closed_form(e1: f64, e2: f64, e1_given_2: f64, e2_given_1: f64) -> f64 {
    (e2 + e1_given_2 - e1) / (e1_given_2 + e2_given_1)
}

/// Race probabilities from waiting times: for every `k`,
/// `E[T_k] = E[T_min] + Σ_{j≠k} P_j E[T_{k|j}]`, with `P_M = 1 − Σ_{j<M} P_j`,
/// solved for `(E[T_min], P_1, …, P_{M−1})`.
pub fn race_solve(patterns: &[Pattern], source: &Source) -> Result<RaceResult> {
    let m = patterns.len();
    if m < 2 {
        return Err(Error::param("a race needs at least two patterns"));
    }
    // Nesting check and alphabet validation.
    Automaton::new(patterns, source.alphabet())?;
    let e: Vec<f64> = patterns
        .iter()
        .map(|a| automaton_expected_time(a, source, AutomatonStart::Fresh))
        .collect::<Result<_>>()?;
    let mut cond = DMatrix::zeros(m, m);
    for k in 0..m {
        for j in 0..m {
            if k != j {
                cond[(k, j)] = conditional_expected_time(&patterns[k], &patterns[j], source)?;
            }
        }
    }
    let last = m - 1;
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for k in 0..m {
        a[(k, 0)] = 1.0;
        let tail = if k != last { cond[(k, last)] } else { 0.0 };
        for j in 0..last {
            let own = if j != k { cond[(k, j)] } else { 0.0 };
            a[(k, j + 1)] = own - tail;
        }
        b[k] = e[k] - tail;
    }
    let x = solve(a, &b).map_err(|err| Error::numerical(format!("race system: {err}")))?;
    let mut probabilities: Vec<f64> = (0..last).map(|j| x[j + 1]).collect();
    probabilities.push(1.0 - probabilities.iter().sum::<f64>());
    if m == 2 {
        let p1 = two_pattern_closed_form(e[0], e[1], cond[(0, 1)], cond[(1, 0)]);
        if (p1 - probabilities[0]).abs() > 1e-10 {
            return Err(Error::numerical(format!("race system {} disagrees with the closed form {p1}", probabilities[0])));
        }
    }
    RaceResult { probabilities, expected_min_time: x[0] }.check(&e)
}

/// Independent oracle: absorption of the multi-pattern automaton.
pub fn race_automaton(patterns: &[Pattern], source: &Source) -> Result<RaceResult> {
    let aut = Automaton::new(patterns, source.alphabet())?;
    let r = absorb(&aut, source, 0, source.initial_lane())?;
    let e: Vec<f64> = patterns
        .iter()
        .map(|a| automaton_expected_time(a, source, AutomatonStart::Fresh))
        .collect::<Result<_>>()?;
    RaceResult { probabilities: r.probabilities, expected_min_time: r.expected_time }.check(&e)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p must lie in (0, 1)"));
    }
    Ok(())
}

/// Probability that `n` consecutive successes appear before `m` consecutive
/// failures when each trial succeeds with probability `p`:
/// `p^{n−1}(1−q^m) / (q^{m−1} + p^{n−1} − q^{m−1} p^{n−1})`.
pub fn run_race_probability(n: u32, m: u32, p: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::param("run lengths must be positive"));
    }
    check_p(p)?;
    let q = 1.0 - p;
    let (pn, qm) = (p.powi(n as i32 - 1), q.powi(m as i32 - 1));
    Ok(pn * (1.0 - q * qm) / (qm + pn - qm * pn))
}

/// Two-stage probability: the first race with `(n, m, p1)`, then a second
/// with `(r, m, p2)`.
pub fn two_stage_race_probability(n: u32, m: u32, p1: f64, r: u32, p2: f64) -> Result<f64> {
    Ok(run_race_probability(n, m, p1)? * run_race_probability(r, m, p2)?)
}

/// Solution of the three-equation conditioning system written out for the
/// `(1,0)^n` versus `1^m 0^m` race, kept for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditioningSystem {
    /// `P(A_1 first)`.
    pub p1: f64,
    /// `P(A_1 first | X_1 = 1, X_2 = 1)`.
    pub p1_given_11: f64,
    /// `P(A_1 first | X_1 = 1, X_2 = 0)`.
    pub p1_given_10: f64,
}

/// Unknowns `(P, a, b)` with `a = P(E | 11)`, `b = P(E | 10)`:
///
/// ```text
/// P = p (p a + q b) + q P
/// b = s + (1 − s) (P/2 + a/2),                       s = (pq)^{n−1}
/// a = r [ (m−2)/(2m−2) b + m/(2m−2) (p a + q b) ],   r = 1 − p^{m−2} q^m
/// ```
pub fn conditioning_system(n: u32, m: u32, p: f64) -> Result<ConditioningSystem> {
    check_p(p)?;
    if n < 1 || m < 2 {
        return Err(Error::param("need n >= 1 and m >= 2"));
    }
    let q = 1.0 - p;
    let s = (p * q).powi(n as i32 - 1);
    let r = 1.0 - p.powi(m as i32 - 2) * q.powi(m as i32);
    let (wb, wa) = ((m as f64 - 2.0) / (2.0 * m as f64 - 2.0), m as f64 / (2.0 * m as f64 - 2.0));
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(3, 3, &[
        1.0 - q,          -p * p,              -p * q,
        -(1.0 - s) * 0.5, -(1.0 - s) * 0.5,    1.0,
        0.0,              1.0 - r * wa * p,    -r * (wb + wa * q),
    ]);
    let x = solve(a, &DVector::from_vec(vec![0.0, s, 0.0]))?;
    Ok(ConditioningSystem { p1: x[0], p1_given_11: x[1], p1_given_10: x[2] })
}

/// Monte Carlo race outcome; trials hitting the step cap are excluded from
/// the estimates and counted in `truncated`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRace {
    pub probabilities: Vec<EstimateWithCI>,
    pub min_time: EstimateWithCI,
    pub truncated: usize,
}

pub const DEFAULT_STEP_CAP: u64 = 1 << 32;

/// Simulate `n_trials` independent races; trial `i` uses child stream `i`.
pub fn simulate_pattern_race(
    patterns: &[Pattern],
    source: &Source,
    n_trials: usize,
    step_cap: u64,
    stream: &RandomStream,
) -> Result<EmpiricalRace> {
    if n_trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let aut = Automaton::new(patterns, source.alphabet())?;
    let sampler = source.sampler();
    let outcomes = replicate(stream, n_trials, |_, rng| {
        let (mut node, mut lane, mut t) = (0usize, source.initial_lane(), 0u64);
        while t < step_cap {
            let (s, l) = sampler.draw(lane, rng);
            node = aut.step(node, s);
            lane = l;
            t += 1;
            if let Some(k) = aut.accepting(node) {
                return Ok(Some((k, t)));
            }
        }
        Ok(None)
    })?;
    let done: Vec<(usize, u64)> = outcomes.iter().flatten().copied().collect();
    let truncated = n_trials - done.len();
    let times: Vec<f64> = done.iter().map(|d| d.1 as f64).collect();
    let probabilities = (0..patterns.len())
        .map(|k| {
            let hits: Vec<f64> = done.iter().map(|d| if d.0 == k { 1.0 } else { 0.0 }).collect();
            EstimateWithCI::from_samples(&hits)
        })
        .collect();
    Ok(EmpiricalRace { probabilities, min_time: EstimateWithCI::from_samples(&times), truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::MarkovChain;
    use crate::rng::derive_stream;

    fn p(s: &[usize]) -> Pattern {
        Pattern::new(s.to_vec()).unwrap()
    }

    fn coin() -> Source {
        Source::bernoulli(0.5).unwrap()
    }

    #[test]
    fn symmetric_race() {
        let r = race_solve(&[p(&[1, 1]), p(&[0, 0])], &coin()).unwrap();
        assert!((r.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((r.expected_min_time - 3.0).abs() < 1e-12);
    }

    #[test]
    fn penney_race_matches_oracle() {
        // HHT vs THH: the classical 1/4.
        let pats = [p(&[1, 1, 0]), p(&[0, 1, 1])];
        let r = race_solve(&pats, &coin()).unwrap();
        let o = race_automaton(&pats, &coin()).unwrap();
        assert!((r.probabilities[0] - 0.25).abs() < 1e-12);
        assert!((o.probabilities[0] - 0.25).abs() < 1e-12);
        assert!((r.expected_min_time - o.expected_min_time).abs() < 1e-10);
    }

    #[test]
    fn three_pattern_markov_race_matches_oracle() {
        let chain = MarkovChain::from_rows(&[vec![0.2, 0.5, 0.3], vec![0.4, 0.4, 0.2], vec![0.6, 0.1, 0.3]]).unwrap();
        let src = Source::markov(chain, 2).unwrap();
        let pats = [p(&[0, 1, 0]), p(&[2, 2]), p(&[1, 0, 2])];
        let r = race_solve(&pats, &src).unwrap();
        let o = race_automaton(&pats, &src).unwrap();
        for k in 0..3 {
            assert!((r.probabilities[k] - o.probabilities[k]).abs() < 1e-10, "{r:?} {o:?}");
        }
        assert!((r.expected_min_time - o.expected_min_time).abs() < 1e-9);
    }

    #[test]
    fn run_race_examples() {
        for n in 1..8 {
            assert_eq!(run_race_probability(n, n, 0.5).unwrap(), 0.5);
        }
        assert!((run_race_probability(2, 3, 0.5).unwrap() - 0.7).abs() < 1e-12);
        for (n, m, pr) in [(2, 3, 0.5), (3, 2, 0.3), (4, 5, 0.65), (1, 1, 0.2)] {
            let src = Source::bernoulli(pr).unwrap();
            let r = race_solve(&[Pattern::runs(n as usize, 0), Pattern::new(vec![0; m as usize]).unwrap()], &src).unwrap();
            assert!((r.probabilities[0] - run_race_probability(n, m, pr).unwrap()).abs() < 1e-10);
        }
        assert!((two_stage_race_probability(2, 3, 0.5, 2, 0.5).unwrap() - 0.49).abs() < 1e-12);
    }

    #[test]
    fn five_six_race_pipelines() {
        let pats = [Pattern::alternating(5), Pattern::runs(6, 6)];
        let r = race_solve(&pats, &coin()).unwrap();
        assert!((r.probabilities[0] - 4096.0 / 5460.0).abs() < 1e-10);
        let o = race_automaton(&pats, &coin()).unwrap();
        assert!((o.probabilities[0] - r.probabilities[0]).abs() < 1e-10);
        let c = conditioning_system(5, 6, 0.5).unwrap();
        assert!((c.p1 - 0.7889).abs() < 5e-5, "{c:?}");
        assert!((c.p1_given_11 - 0.7884).abs() < 5e-5 && (c.p1_given_10 - 0.7895).abs() < 5e-5);
    }

    #[test]
    fn simulated_race_agrees() {
        let pats = [p(&[1, 1]), p(&[0, 0])];
        let e = simulate_pattern_race(&pats, &coin(), 20_000, DEFAULT_STEP_CAP, &derive_stream(3, 0)).unwrap();
        assert!(e.probabilities[0].within(0.5, 3.0, 0.0), "{e:?}");
        assert!(e.min_time.within(3.0, 3.0, 0.0), "{e:?}");
        assert_eq!(e.truncated, 0);
    }

    #[test]
    fn step_cap_counts_truncation() {
        let pats = [Pattern::runs(8, 0), Pattern::new(vec![0; 8]).unwrap()];
        let e = simulate_pattern_race(&pats, &coin(), 200, 3, &derive_stream(3, 1)).unwrap();
        assert_eq!(e.truncated, 200);
    }
}
