use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite word over the alphabet `{0, .., alphabet-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern {
    symbols: Vec<usize>,
}

impl Pattern {
    pub fn new(symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::param("a pattern needs at least one symbol"));
        }
        Ok(Self { symbols })
    }

    /// `(1,0)` repeated `n` times.
    pub fn alternating(n: usize) -> Self {
        Self { symbols: (0..2 * n).map(|i| 1 - i % 2).collect() }
    }

    /// `1^n 0^m`.
    pub fn runs(ones: usize, zeros: usize) -> Self {
        Self { symbols: std::iter::repeat_n(1, ones).chain(std::iter::repeat_n(0, zeros)).collect() }
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn first(&self) -> usize {
        self.symbols[0]
    }

    pub fn last(&self) -> usize {
        self.symbols[self.symbols.len() - 1]
    }

    pub fn check_alphabet(&self, alphabet: usize) -> Result<()> {
        match self.symbols.iter().find(|&&s| s >= alphabet) {
            Some(s) => Err(Error::param(format!("symbol {s} is outside the alphabet of size {alphabet}"))),
            None => Ok(()),
        }
    }

    /// Prefix of length `k`.
    pub fn prefix(&self, k: usize) -> Pattern {
        Pattern { symbols: self.symbols[..k].to_vec() }
    }

    /// Whether `self` occurs as a contiguous window of `other`.
    pub fn occurs_in(&self, other: &Pattern) -> bool {
        other.symbols.windows(self.len()).any(|w| w == self.symbols.as_slice())
    }
}

/// KMP failure function: `fail[j]` is the longest proper border of the
/// prefix of length `j` (`fail[0] = 0`).
pub fn failure_function(symbols: &[usize]) -> Vec<usize> {
    let m = symbols.len();
    let mut fail = vec![0; m + 1];
    let mut k = 0;
    for j in 1..m {
        while k > 0 && symbols[j] != symbols[k] {
            k = fail[k];
        }
        if symbols[j] == symbols[k] {
            k += 1;
        }
        fail[j + 1] = k;
    }
    fail
}

/// Largest `k < m` with `(x_1..x_k) = (x_{m-k+1}..x_m)`.
pub fn overlap_size(pattern: &Pattern) -> usize {
    failure_function(pattern.symbols())[pattern.len()]
}
