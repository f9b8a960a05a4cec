//! Thin wrappers over `libm` so the crate builds without `std`.
//!
//! `core` does not provide the transcendental `f64` methods, so every float
//! call in this crate goes through here. Keeping them in one place also pins
//! exactly which primitives the numerics depend on.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}

/// Sign convention used by the decoders: zero maps to +1.
///
/// An analog readout of exactly 0 thresholds to the trivial syndrome bit, so
/// its log-likelihood sign must be +1 as well.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}
