use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::source::Source;
use super::word::{failure_function, Pattern};
use crate::error::{Error, Result};
use crate::linalg::solve;

/// Aho–Corasick automaton for a set of patterns, none of which occurs inside
/// another. For a single pattern node `j` is the prefix of length `j`, i.e.
/// the KMP automaton.
#[derive(Debug, Clone)]
pub struct Automaton {
    alphabet: usize,
    delta: Vec<usize>,
    depth: Vec<usize>,
    accept: Vec<Option<usize>>,
    prefix_nodes: Vec<Vec<usize>>,
}

impl Automaton {
    pub fn new(patterns: &[Pattern], alphabet: usize) -> Result<Self> {
        if patterns.is_empty() || alphabet == 0 {
            return Err(Error::param("need at least one pattern and a nonempty alphabet"));
        }
        for (i, a) in patterns.iter().enumerate() {
            a.check_alphabet(alphabet)?;
            for (j, b) in patterns.iter().enumerate() {
                if i != j && a.occurs_in(b) {
                    return Err(Error::hypothesis(format!("pattern {i} occurs inside pattern {j}")));
                }
            }
        }
        const NONE: usize = usize::MAX;
        let mut goto = vec![vec![NONE; alphabet]];
        let mut depth = vec![0];
        let mut accept = vec![None];
        let mut prefix_nodes = Vec::new();
        for (k, pat) in patterns.iter().enumerate() {
            let mut node = 0;
            let mut path = vec![0];
            for &s in pat.symbols() {
                if goto[node][s] == NONE {
                    goto.push(vec![NONE; alphabet]);
                    depth.push(depth[node] + 1);
                    accept.push(None);
                    goto[node][s] = goto.len() - 1;
                }
                node = goto[node][s];
                path.push(node);
            }
            accept[node] = Some(k);
            prefix_nodes.push(path);
        }
        let n = goto.len();
        let mut fail = vec![0; n];
        let mut delta = vec![0; n * alphabet];
        let mut queue = VecDeque::new();
        for s in 0..alphabet {
            let child = goto[0][s];
            if child == NONE {
                delta[s] = 0;
            } else {
                delta[s] = child;
                queue.push_back(child);
            }
        }
        while let Some(u) = queue.pop_front() {
            for s in 0..alphabet {
                let v = goto[u][s];
                if v == NONE {
                    delta[u * alphabet + s] = delta[fail[u] * alphabet + s];
                } else {
                    fail[v] = delta[fail[u] * alphabet + s];
                    delta[u * alphabet + s] = v;
                    queue.push_back(v);
                }
            }
        }
        Ok(Self { alphabet, delta, depth, accept, prefix_nodes })
    }

    pub fn single(pattern: &Pattern, alphabet: usize) -> Result<Self> {
        Self::new(std::slice::from_ref(pattern), alphabet)
    }

    pub fn nodes(&self) -> usize {
        self.depth.len()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    #[inline]
    pub fn step(&self, node: usize, symbol: usize) -> usize {
        self.delta[node * self.alphabet + symbol]
    }

    pub fn accepting(&self, node: usize) -> Option<usize> {
        self.accept[node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    /// Node for the length-`len` prefix of pattern `k`.
    pub fn prefix_node(&self, k: usize, len: usize) -> usize {
        self.prefix_nodes[k][len]
    }

    /// Feed `symbols` from `node`; `None` if some pattern completes on the way.
    pub fn feed(&self, mut node: usize, symbols: &[usize]) -> Option<usize> {
        for &s in symbols {
            node = self.step(node, s);
            if self.accept[node].is_some() {
                return None;
            }
        }
        Some(node)
    }
}

/// Expected absorption time and per-pattern absorption probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Absorption {
    pub expected_time: f64,
    pub probabilities: Vec<f64>,
}

/// Solve the first-step equations on the transient `(node, lane)` states
/// reachable from `(node, lane)`.
pub fn absorb(aut: &Automaton, source: &Source, node: usize, lane: usize) -> Result<Absorption> {
    if source.alphabet() != aut.alphabet() {
        return Err(Error::param("source and automaton alphabets differ"));
    }
    let n_patterns = aut.prefix_nodes.len();
    if let Some(k) = aut.accepting(node) {
        let mut probabilities = vec![0.0; n_patterns];
        probabilities[k] = 1.0;
        return Ok(Absorption { expected_time: 0.0, probabilities });
    }
    let lanes = source.lanes();
    let key = |nd: usize, ln: usize| nd * lanes + ln;
    let mut index = vec![usize::MAX; aut.nodes() * lanes];
    let mut states = vec![(node, lane)];
    index[key(node, lane)] = 0;
    let mut head = 0;
    while head < states.len() {
        let (nd, ln) = states[head];
        head += 1;
        for s in 0..aut.alphabet() {
            if source.prob(ln, s) == 0.0 {
                continue;
            }
            let next = aut.step(nd, s);
            let nl = source.lane_after(s);
            if aut.accepting(next).is_none() && index[key(next, nl)] == usize::MAX {
                index[key(next, nl)] = states.len();
                states.push((next, nl));
            }
        }
    }
    let n = states.len();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut rhs_hit = vec![DVector::<f64>::zeros(n); n_patterns];
    for (i, &(nd, ln)) in states.iter().enumerate() {
        for s in 0..aut.alphabet() {
            let p = source.prob(ln, s);
            if p == 0.0 {
                continue;
            }
            let next = aut.step(nd, s);
            match aut.accepting(next) {
                Some(k) => rhs_hit[k][i] += p,
                None => a[(i, index[key(next, source.lane_after(s))])] -= p,
            }
        }
    }
    let time = solve(a.clone(), &DVector::from_element(n, 1.0))
        .map_err(|e| Error::numerical(format!("absorption time system: {e}")))?;
    let mut probabilities = Vec::with_capacity(n_patterns);
    for b in &rhs_hit {
        let h = solve(a.clone(), b).map_err(|e| Error::numerical(format!("absorption probability system: {e}")))?;
        probabilities.push(h[0]);
    }
    Ok(Absorption { expected_time: time[0], probabilities })
}

/// Where the single-pattern automaton starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomatonStart {
    /// Nothing matched yet; Markov lane is the source's initial state.
    Fresh,
    /// Just after an occurrence, overlaps allowed: restart at the border.
    Overlapping,
    /// Just after an occurrence, occurrences may not share symbols.
    Renewal,
}

/// Expected steps to reach prefix node `node + 1 .. m` level by level.
///
/// In the single-pattern automaton every transition from node `i` lands on
/// a node `<= i + 1`, so the absorption system is block lower Hessenberg and
/// can be solved by forward substitution on the climbing times
/// `D_i = E[steps from node i to node i+1]`:
///
/// `D_i P(x_i → x_{i+1}) = 1 + Σ_{a ≠ x_{i+1}} P(x_i → a) (G_a 1{δ(i,a)=0} + Σ_{l=max(δ(i,a),1)}^{i−1} D_l)`
///
/// where `G_a` is the time to leave node 0 from lane `a`. Every term is
/// nonnegative, so there is no cancellation even when waiting times are huge.
struct Ladder {
    /// `G_lane`: expected steps from node 0 to node 1.
    entry: Vec<f64>,
    /// `D_i` for `i = 1 .. m-1`; `climb[0]` is unused.
    climb: Vec<f64>,
}

fn ladder(pattern: &Pattern, source: &Source) -> Result<Ladder> {
    let aut = Automaton::single(pattern, source.alphabet())?;
    let x = pattern.symbols();
    let m = x.len();
    let lanes = source.lanes();
    let alphabet = source.alphabet();
    // G_a = 1 + Σ_{b ≠ x_1} P(a, b) G_b, one small system over lanes.
    let entry = if lanes == 1 {
        let p = source.prob(0, x[0]);
        if p == 0.0 {
            return Err(Error::numerical("pattern can never start"));
        }
        vec![1.0 / p]
    } else {
        let a = DMatrix::from_fn(lanes, lanes, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            if j == x[0] {
                delta
            } else {
                delta - source.prob(i, j)
            }
        });
        solve(a, &DVector::from_element(lanes, 1.0))
            .map_err(|e| Error::numerical(format!("entry-time system: {e}")))?
            .iter()
            .copied()
            .collect()
    };
    let mut climb = vec![0.0; m];
    let mut prefix = vec![0.0; m + 1];
    for i in 1..m {
        let lane = source.lane_after(x[i - 1]);
        let mut acc = 1.0;
        for a in 0..alphabet {
            let pa = source.prob(lane, a);
            if a == x[i] || pa == 0.0 {
                continue;
            }
            let back = aut.step(i, a);
            let mut cost = prefix[i] - prefix[back.max(1)];
            if back == 0 {
                cost += entry[source.lane_after(a)];
            }
            acc += pa * cost;
        }
        let up = source.prob(lane, x[i]);
        if up == 0.0 {
            return Err(Error::numerical("pattern contains an impossible transition"));
        }
        climb[i] = acc / up;
        prefix[i + 1] = prefix[i] + climb[i];
    }
    if climb.iter().chain(&entry).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::numerical("absorption times are not finite"));
    }
    Ok(Ladder { entry, climb })
}

/// Expected steps to complete `pattern` from automaton node `node`; for
/// `node >= 1` the lane is implied by the prefix.
fn ladder_time(pattern: &Pattern, source: &Source, node: usize, lane: usize) -> Result<f64> {
    let l = ladder(pattern, source)?;
    let from = if node == 0 { l.entry[lane] } else { 0.0 };
    Ok(from + l.climb[node.max(1)..].iter().sum::<f64>())
}

/// Exact expected waiting time for `pattern` from the KMP automaton's
/// absorption equations.
pub fn automaton_expected_time(pattern: &Pattern, source: &Source, start: AutomatonStart) -> Result<f64> {
    let (node, lane) = match start {
        AutomatonStart::Fresh => (0, source.initial_lane()),
        AutomatonStart::Overlapping => {
            (failure_function(pattern.symbols())[pattern.len()], source.lane_after(pattern.last()))
        }
        AutomatonStart::Renewal => (0, source.lane_after(pattern.last())),
    };
    ladder_time(pattern, source, node, lane)
}

/// Expected additional time to see `a_i` right after an occurrence of `a_j`.
/// The carry-over is the longest suffix of `a_j` that is a prefix of `a_i`
/// (the border when `i = j`); Markov sources also condition on `a_j`'s last
/// symbol.
pub fn conditional_expected_time(a_i: &Pattern, a_j: &Pattern, source: &Source) -> Result<f64> {
    if a_i == a_j {
        return automaton_expected_time(a_i, source, AutomatonStart::Overlapping);
    }
    let aut = Automaton::single(a_i, source.alphabet())?;
    a_j.check_alphabet(source.alphabet())?;
    let node = aut
        .feed(0, a_j.symbols())
        .ok_or_else(|| Error::hypothesis("the first pattern already occurs inside the second"))?;
    ladder_time(a_i, source, node, source.lane_after(a_j.last()))
}
