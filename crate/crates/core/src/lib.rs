//! Analog-syndrome decoding of CSS quantum LDPC codes.
//!
//! This crate implements the algorithmic core of a decoding toolkit for
//! quantum LDPC codes whose syndrome measurements yield *analog* (soft)
//! readouts instead of clean bits:
//!
//! - sparse GF(2) linear algebra and chain complexes ([`gf2`], [`complex`]),
//! - CSS code constructions: 3D surface/toric codes and lifted-product
//!   codes ([`codes`]),
//! - Pauli channels and Gaussian syndrome noise ([`noise`]),
//! - min-sum belief propagation, soft-syndrome min-sum, and ordered-statistics
//!   post-processing ([`decoder`]),
//! - analog Tanner graph decoding, single-shot metacheck decoding,
//!   overlapping-window time-domain decoding, and the quasi-single-shot
//!   protocol ([`analog`]),
//! - Monte Carlo sample runners, error-rate statistics, and threshold
//!   fitting ([`sim`], [`fit`]).
//!
//! The crate is `no_std`-compatible (alloc required); float math goes through
//! `libm`. All randomness is injected through [`rng`] streams so that every
//! sampled quantity is a pure function of `(master_seed, sample_index,
//! stream_tag)`, independent of scheduling.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analog;
pub mod codes;
pub mod complex;
pub mod decoder;
pub mod fit;
pub mod gf2;
pub mod noise;
pub mod rng;
pub mod sim;

pub(crate) mod float;
