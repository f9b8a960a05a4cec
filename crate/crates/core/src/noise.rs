//! Pauli error channels and analog (soft) syndrome noise.
//!
//! Data qubits suffer independent Pauli errors drawn from a
//! [`PauliChannel`]. Syndrome measurements return analog values: the ideal
//! readout is `(-1)^s` for syndrome bit `s`, smeared by Gaussian noise of
//! width `sigma`. Thresholding an analog value at zero reproduces a
//! bit-flip syndrome channel with flip probability
//! `p = erfc(1/(sqrt(2) sigma)) / 2`, and the log-likelihood ratio of a
//! readout `y` is `2 y / sigma²`.
//!
//! The complementary error function is implemented here directly (Taylor
//! series below 2, a Lentz continued fraction above) so the crate stays
//! `no_std`; an integration oracle in the tests pins its accuracy.

use alloc::vec::Vec;

use crate::float;
use crate::gf2::BitVec;
use crate::rng::SampleRng;

/// Probability clamp for virtual-bit priors derived from analog values.
pub const PRIOR_CLAMP: f64 = 1e-12;

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6;
const SQRT_2: f64 = core::f64::consts::SQRT_2;

// ---------------------------------------------------------------------------
// Pauli channels
// ---------------------------------------------------------------------------

/// An independent single-qubit Pauli channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    /// Probability of an X error.
    pub p_x: f64,
    /// Probability of a Y error (acts on both sides).
    pub p_y: f64,
    /// Probability of a Z error.
    pub p_z: f64,
}

impl PauliChannel {
    /// Depolarizing channel: total error probability `p`, split evenly.
    #[must_use]
    pub fn depolarizing(p: f64) -> Self {
        Self { p_x: p / 3.0, p_y: p / 3.0, p_z: p / 3.0 }
    }

    /// Pure bit-flip channel.
    #[must_use]
    pub fn bit_flip(p: f64) -> Self {
        Self { p_x: p, p_y: 0.0, p_z: 0.0 }
    }

    /// Pure phase-flip channel.
    #[must_use]
    pub fn phase_flip(p: f64) -> Self {
        Self { p_x: 0.0, p_y: 0.0, p_z: p }
    }

    /// Channel with total error probability `p` split proportionally to the
    /// ratios `(r_x, r_y, r_z)`.
    ///
    /// # Panics
    /// Panics if all ratios are zero or any is negative.
    #[must_use]
    pub fn from_ratios(p: f64, r_x: f64, r_y: f64, r_z: f64) -> Self {
        assert!(
            r_x >= 0.0 && r_y >= 0.0 && r_z >= 0.0 && r_x + r_y + r_z > 0.0,
            "ratios must be nonnegative and not all zero"
        );
        let total = r_x + r_y + r_z;
        Self { p_x: p * r_x / total, p_y: p * r_y / total, p_z: p * r_z / total }
    }

    /// Total probability that any error occurs.
    #[must_use]
    pub fn total(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    /// Marginal probability that the X component flips (X or Y error).
    #[must_use]
    pub fn marginal_x(&self) -> f64 {
        self.p_x + self.p_y
    }

    /// Marginal probability that the Z component flips (Z or Y error).
    #[must_use]
    pub fn marginal_z(&self) -> f64 {
        self.p_z + self.p_y
    }

    /// Samples an error on `n` qubits; returns the X and Z components.
    ///
    /// Y errors set both components of the same qubit, so the two returned
    /// vectors are correlated.
    #[must_use]
    pub fn sample(&self, n: usize, rng: &mut SampleRng) -> (BitVec, BitVec) {
        let mut e_x = BitVec::zeros(n);
        let mut e_z = BitVec::zeros(n);
        let t_x = self.p_x;
        let t_y = self.p_x + self.p_y;
        let t_z = self.p_x + self.p_y + self.p_z;
        for i in 0..n {
            let u = rng.uniform();
            if u < t_x {
                e_x.set(i, true);
            } else if u < t_y {
                e_x.set(i, true);
                e_z.set(i, true);
            } else if u < t_z {
                e_z.set(i, true);
            }
        }
        (e_x, e_z)
    }
}

// ---------------------------------------------------------------------------
// Analog syndrome readout
// ---------------------------------------------------------------------------

/// One round of analog syndrome readouts with known noise width.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogSyndrome {
    /// Raw analog values, one per check.
    pub values: Vec<f64>,
    /// Gaussian noise width of the readout.
    pub sigma: f64,
}

impl AnalogSyndrome {
    /// Wraps raw readouts.
    #[must_use]
    pub fn new(values: Vec<f64>, sigma: f64) -> Self {
        Self { values, sigma }
    }

    /// A noiseless readout of a hard syndrome: `(-1)^s` exactly.
    #[must_use]
    pub fn noiseless(syndrome: &BitVec) -> Self {
        let values = (0..syndrome.len())
            .map(|i| if syndrome.get(i) { -1.0 } else { 1.0 })
            .collect();
        Self { values, sigma: 0.0 }
    }

    /// Thresholds to hard syndrome bits: negative readout means the check
    /// fired. An exactly-zero readout counts as not fired.
    #[must_use]
    pub fn hard(&self) -> BitVec {
        let mut s = BitVec::zeros(self.values.len());
        for (i, &v) in self.values.iter().enumerate() {
            if v < 0.0 {
                s.set(i, true);
            }
        }
        s
    }

    /// Log-likelihood ratios `2 y / sigma²`, positive when the check most
    /// likely did not fire.
    ///
    /// # Panics
    /// Panics if `sigma` is not positive.
    #[must_use]
    pub fn llrs(&self) -> Vec<f64> {
        assert!(self.sigma > 0.0, "llrs need sigma > 0");
        let scale = 2.0 / (self.sigma * self.sigma);
        self.values.iter().map(|&v| v * scale).collect()
    }
}

/// Samples an analog readout of `syndrome` with Gaussian width `sigma`.
#[must_use]
pub fn sample_analog_syndrome(
    syndrome: &BitVec,
    sigma: f64,
    rng: &mut SampleRng,
) -> AnalogSyndrome {
    let values = (0..syndrome.len())
        .map(|i| {
            let ideal = if syndrome.get(i) { -1.0 } else { 1.0 };
            ideal + sigma * rng.standard_normal()
        })
        .collect();
    AnalogSyndrome::new(values, sigma)
}

/// Log-likelihood ratio of a single analog readout.
#[must_use]
pub fn analog_llr(value: f64, sigma: f64) -> f64 {
    2.0 * value / (sigma * sigma)
}

/// Converts an LLR `ln(p0/p1)` to the flip probability `p1`, stably on both
/// tails.
#[must_use]
pub fn llr_to_prob(llr: f64) -> f64 {
    if llr >= 0.0 {
        let e = float::exp(-llr);
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + float::exp(llr))
    }
}

/// Converts a flip probability to its LLR `ln((1-p)/p)`.
#[must_use]
pub fn prob_to_llr(p: f64) -> f64 {
    float::ln((1.0 - p) / p)
}

/// Gaussian noise width that makes the thresholded syndrome flip with
/// probability `p`.
///
/// Inverts `p = erfc(1/(sqrt(2) sigma)) / 2`.
///
/// # Panics
/// Panics unless `0 < p < 0.5`.
#[must_use]
pub fn sigma_from_p(p: f64) -> f64 {
    assert!(p > 0.0 && p < 0.5, "flip probability must be in (0, 0.5)");
    1.0 / (SQRT_2 * erfc_inv(2.0 * p))
}

/// Syndrome-bit flip probability of a thresholded Gaussian readout.
///
/// # Panics
/// Panics unless `sigma > 0`.
#[must_use]
pub fn p_from_sigma(sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    0.5 * erfc(1.0 / (SQRT_2 * sigma))
}

// ---------------------------------------------------------------------------
// erfc and its inverse
// ---------------------------------------------------------------------------

/// Complementary error function.
///
/// Relative accuracy is about 1e-14 over the full range (absolute near the
/// zero crossing at negative arguments).
#[must_use]
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Taylor series for erf, accurate for small arguments.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        let n_f = n as f64;
        term *= -x2 / n_f;
        let contribution = term / (2.0 * n_f + 1.0);
        sum += contribution;
        if float::abs(contribution) < 1e-17 * float::abs(sum) {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// Modified Lentz evaluation of the continued fraction
/// `erfc(x) = exp(-x²)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x.max(TINY);
    let mut c = f;
    let mut d = 0.0;
    for k in 1..300 {
        let a = k as f64 / 2.0;
        // Convergent step for b = x, a_k = k/2.
        d = x + a * d;
        if float::abs(d) < TINY {
            d = TINY;
        }
        c = x + a / c;
        if float::abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if float::abs(delta - 1.0) < 1e-16 {
            break;
        }
    }
    float::exp(-x * x) * FRAC_2_SQRT_PI / 2.0 / f
}

/// Inverse complementary error function on (0, 2).
///
/// Safeguarded Newton iteration: steps that leave the current bracket fall
/// back to bisection. Converges to machine precision.
///
/// # Panics
/// Panics unless `0 < y < 2`.
#[must_use]
pub fn erfc_inv(y: f64) -> f64 {
    assert!(y > 0.0 && y < 2.0, "erfc_inv domain is (0, 2)");
    if y > 1.0 {
        return -erfc_inv(2.0 - y);
    }
    if y == 1.0 {
        return 0.0;
    }
    // erfc decreases from 1 at x=0; erfc(30) underflows far below any
    // representable y in (0, 1), so [0, 30] brackets every root here.
    let (mut lo, mut hi) = (0.0_f64, 30.0_f64);
    let mut x = 1.0;
    for _ in 0..200 {
        let fx = erfc(x) - y;
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let derivative = -FRAC_2_SQRT_PI * float::exp(-x * x);
        let step = fx / derivative;
        let mut next = x - step;
        if !(lo..=hi).contains(&next) {
            next = 0.5 * (lo + hi);
        }
        if float::abs(next - x) <= 1e-16 * (1.0 + float::abs(x)) {
            return next;
        }
        x = next;
    }
    x
}
