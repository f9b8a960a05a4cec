//! Deterministic random streams for Monte Carlo sampling.
//!
//! Every sampled quantity must be a pure function of the master seed, the
//! sample index, and a stream tag, so that results do not depend on thread
//! count or scheduling. Each (seed, sample, tag) triple is expanded through a
//! splitmix64 chain into a 256-bit key for a ChaCha stream cipher RNG.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::float;

/// Distinguishes independent random streams within one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    /// Pauli error sampling on the data qubits.
    Error,
    /// Gaussian syndrome noise on the X-check side.
    SyndromeX,
    /// Gaussian syndrome noise on the Z-check side.
    SyndromeZ,
}

impl StreamTag {
    const fn id(self) -> u64 {
        match self {
            StreamTag::Error => 0xE5,
            StreamTag::SyndromeX => 0x51,
            StreamTag::SyndromeZ => 0x52,
        }
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic per-sample random stream.
pub struct SampleRng {
    rng: ChaCha8Rng,
    /// Cached second output of the Gaussian pair generator.
    spare_normal: Option<f64>,
}

impl SampleRng {
    /// Creates the stream for `(master_seed, sample_index, tag)`.
    #[must_use]
    pub fn new(master_seed: u64, sample_index: u64, tag: StreamTag) -> Self {
        let mut state = master_seed;
        let mix = |v: u64, st: &mut u64| {
            *st ^= v.wrapping_mul(0xA24B_AED4_963E_E407);
            splitmix64(st)
        };
        let mut key = [0u8; 32];
        let mut chain = mix(sample_index, &mut state);
        chain ^= mix(tag.id(), &mut state);
        let mut keystate = chain;
        for word in key.chunks_exact_mut(8) {
            word.copy_from_slice(&splitmix64(&mut keystate).to_le_bytes());
        }
        Self { rng: ChaCha8Rng::from_seed(key), spare_normal: None }
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via the Box-Muller transform.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 must be strictly positive for the logarithm.
        let mut u1 = self.uniform();
        while u1 == 0.0 {
            u1 = self.uniform();
        }
        let u2 = self.uniform();
        let radius = float::sqrt(-2.0 * float::ln(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(radius * float::sin(angle));
        radius * float::cos(angle)
    }
}
