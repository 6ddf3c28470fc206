//! Counter-based random streams.
//!
//! A stream is a ChaCha8 keystream whose key is expanded from the master seed
//! and whose 64-bit stream id is the stream index, so distinct indices under
//! one seed read disjoint keystreams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_from_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Deterministic stream for `(master_seed, stream_index)`.
pub fn derive_stream(master_seed: u64, stream_index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::from_seed(key_from_seed(master_seed));
    rng.set_stream(stream_index);
    RandomStream {
        master_seed,
        stream_index,
        rng,
    }
}

impl RandomStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Child stream `index` of this stream. Children of different parents
    /// use different keys; children of one parent differ by stream id.
    pub fn child(&self, index: u64) -> RandomStream {
        let mut state = self.master_seed ^ 0xA076_1D64_78BD_642F;
        let a = splitmix64(&mut state);
        let mut state = a ^ self.stream_index.wrapping_mul(0xE703_7ED1_A0B4_28DB);
        let child_seed = splitmix64(&mut state);
        derive_stream(child_seed, index)
    }

    /// Fresh copy positioned at the start of this stream's keystream.
    pub fn restart(&self) -> RandomStream {
        derive_stream(self.master_seed, self.stream_index)
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in (0, 1], safe for `ln`.
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        use rand_distr::{Distribution, StandardNormal};
        StandardNormal.sample(self)
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform_open0().ln() / rate
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
