//! Seed derivation and the primitive draws every generator is built from.
//!
//! A stream is identified by `(seed, index)`. The pair is folded into one
//! 64-bit word with the SplitMix64 finalizer:
//!
//! ```text
//! mix64(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
//!            z ^= z >> 27; z *= 0x94D049BB133111EB
//!            z ^= z >> 31
//! derive_seed(seed, i) = mix64(seed + mix64((i + 1) · 0x9E3779B97F4A7C15))
//! ```
//!
//! The derived word expands into a 256-bit ChaCha8 key by running SplitMix64
//! four times (increment `0x9E3779B97F4A7C15`, little-endian words). ChaCha is
//! counter based, so every matrix row owns an independent stream and rows may
//! be generated in any order or in parallel with identical results.
//!
//! Draws are defined here rather than taken from `rand` so the bit-level
//! output does not depend on the `rand` version:
//!
//! * [`unit_f64`]: top 53 bits of one `u64`, scaled by 2⁻⁵³, in `[0, 1)`.
//! * [`below`]: Lemire's multiply-shift with rejection, unbiased on `[0, n)`.
//! * [`NormalPair`]: Marsaglia's polar method, yielding variates in pairs.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub type Stream = ChaCha8Rng;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for sub-task `index` (a matrix row, a Monte Carlo trial, a run).
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))))
}

pub fn substream(seed: u64, index: u64) -> Stream {
    let mut state = derive_seed(seed, index);
    let mut key = [0u8; 32];
    for word in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN_GAMMA);
        word.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[inline]
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, n)`. `n` must be non-zero.
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    debug_assert!(n > 0);
    let mut m = rng.next_u64() as u128 * n as u128;
    let mut low = m as u64;
    if low < n {
        let threshold = n.wrapping_neg() % n;
        while low < threshold {
            m = rng.next_u64() as u128 * n as u128;
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// `+1.0` or `-1.0` with equal probability, from the top bit of one draw.
#[inline]
pub fn sign<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    if rng.next_u64() >> 63 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Standard normal variates from the polar method; the second variate of
/// each accepted pair is cached.
#[derive(Debug, Default)]
pub struct NormalPair {
    spare: Option<f64>,
}

impl NormalPair {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sample<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * unit_f64(rng) - 1.0;
            let v = 2.0 * unit_f64(rng) - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}
