//! Counter-based deterministic randomness.
//!
//! Every draw in the simulation harness is a pure function of the key
//! `(seed, rep, i)`, so replicates can be computed in any order, on any
//! number of threads, with bit-identical results.

/// Stafford's mix13 finalizer (the SplitMix64 output function).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

/// A uniform draw in the open interval `(0, 1)` keyed by `(seed, rep, i)`.
pub fn uniform_keyed(seed: u64, rep: u64, i: u64) -> f64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ rep.wrapping_mul(GOLDEN));
    h = mix64(h ^ i.wrapping_mul(GOLDEN));
    to_unit_open(h)
}

/// Map a 64-bit word to `(0, 1)`: 52 mantissa bits, centered so neither
/// endpoint is reachable even after rounding.
#[inline]
pub fn to_unit_open(word: u64) -> f64 {
    ((word >> 12) as f64 + 0.5) * (1.0 / 4503599627370496.0)
}

/// Sequential SplitMix64 generator, used for test-data generation.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        to_unit_open(self.next_u64())
    }

    /// Uniform in `0..n` (`n > 0`).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}
