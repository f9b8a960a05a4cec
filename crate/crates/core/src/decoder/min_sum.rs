//! Serial-schedule min-sum decoding, with hard or soft syndromes.
//!
//! Both decoders sweep the bits in ascending order; messages updated earlier
//! in a sweep feed later updates in the same sweep, which converges roughly
//! twice as fast as a parallel (flooding) schedule. Check messages are
//! recomputed from scratch at each visit (a leave-one-out scan of the
//! check's incoming messages), so no per-edge check state is stored.
//!
//! The soft-syndrome variant keeps one belief `γ_c` per check, initialized
//! to the syndrome log-likelihood ratio. Checks whose belief magnitude is at
//! most the trust threshold participate in the minimization like ordinary
//! messages and are re-estimated inline from the bit evidence; stronger
//! beliefs act as fixed signs exactly like a hard syndrome.

use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::gf2::BitVec;

use super::{DecodeResult, DecoderConfig, TannerGraph};

/// Result of a soft-syndrome decode: the estimate plus the decoder's final
/// per-check syndrome beliefs.
#[derive(Debug, Clone)]
pub struct SsmsaResult {
    /// The message-passing result.
    pub decode: DecodeResult,
    /// Final syndrome beliefs; thresholding them gives the syndrome the
    /// estimate was matched against.
    pub syndrome_beliefs: Vec<f64>,
}

/// Normalized min-sum decoding of a hard syndrome, serial schedule.
///
/// `priors` are per-bit log-likelihood ratios `ln((1-p)/p)`; positive means
/// the bit is probably unflipped. Convergence is declared as soon as the
/// hard decision satisfies `syndrome` at the end of a sweep.
///
/// # Panics
/// Panics if `priors` or `syndrome` lengths disagree with the graph.
#[must_use]
pub fn min_sum_decode(
    graph: &TannerGraph,
    priors: &[f64],
    syndrome: &BitVec,
    config: &DecoderConfig,
) -> DecodeResult {
    assert_eq!(priors.len(), graph.n_bits(), "one prior per bit");
    assert_eq!(syndrome.len(), graph.n_checks(), "one syndrome bit per check");
    let n = graph.n_bits();

    let mut nu = init_messages(graph, priors);
    let mut lambda = priors.to_vec();
    let mut mu_scratch = vec![0.0; max_bit_degree(graph)];
    let mut estimate = BitVec::zeros(n);

    for iteration in 1..=config.max_iter {
        for b in 0..n {
            let edges = graph.edges_of_bit(b);
            let mut posterior = priors[b];
            for (slot, &e) in edges.iter().enumerate() {
                let e = e as usize;
                let c = graph.check_of_edge(e);
                let mut magnitude = f64::INFINITY;
                let mut sign = if syndrome.get(c) { -1.0 } else { 1.0 };
                for idx in graph.check_edge_range(c) {
                    if idx == e {
                        continue;
                    }
                    let v = nu[idx];
                    sign *= float::sgn(v);
                    magnitude = magnitude.min(float::abs(v));
                }
                let mu = config.alpha * magnitude * sign;
                mu_scratch[slot] = mu;
                posterior += mu;
            }
            lambda[b] = posterior;
            for (slot, &e) in edges.iter().enumerate() {
                nu[e as usize] = posterior - mu_scratch[slot];
            }
        }

        hard_decision(&lambda, &mut estimate);
        if graph.syndrome_of(&estimate) == *syndrome {
            return DecodeResult { estimate, converged: true, iterations: iteration, posteriors: lambda };
        }
    }
    DecodeResult {
        estimate,
        converged: false,
        iterations: config.max_iter,
        posteriors: lambda,
    }
}

/// Soft-syndrome min-sum decoding, serial schedule.
///
/// `syndrome_llrs` hold one log-likelihood ratio per check, positive when
/// the check most likely did not fire (for an analog readout `y` with noise
/// width `sigma` this is `2y/sigma²`). Convergence is checked against the
/// thresholded *current* beliefs, which the decoder may have revised away
/// from the input.
///
/// With a trust threshold of zero and nonzero syndrome LLRs, no belief ever
/// qualifies for re-estimation and this reduces exactly to
/// [`min_sum_decode`] on the thresholded syndrome.
///
/// # Panics
/// Panics if `priors` or `syndrome_llrs` lengths disagree with the graph.
#[must_use]
pub fn ssmsa_decode(
    graph: &TannerGraph,
    priors: &[f64],
    syndrome_llrs: &[f64],
    config: &DecoderConfig,
) -> SsmsaResult {
    assert_eq!(priors.len(), graph.n_bits(), "one prior per bit");
    assert_eq!(syndrome_llrs.len(), graph.n_checks(), "one LLR per check");
    let n = graph.n_bits();

    let mut nu = init_messages(graph, priors);
    let mut gamma = syndrome_llrs.to_vec();
    let mut lambda = priors.to_vec();
    let mut mu_scratch = vec![0.0; max_bit_degree(graph)];
    let mut estimate = BitVec::zeros(n);
    let mut target = BitVec::zeros(graph.n_checks());

    for iteration in 1..=config.max_iter {
        for b in 0..n {
            let edges = graph.edges_of_bit(b);
            let mut posterior = priors[b];
            for (slot, &e) in edges.iter().enumerate() {
                let e = e as usize;
                let c = graph.check_of_edge(e);
                let g = gamma[c];
                let mu;
                if float::abs(g) <= config.gamma {
                    // The syndrome belief is no more reliable than a message:
                    // let it compete in the minimization (over all incident
                    // bits, itself included) and re-estimate it inline.
                    let mut mag_all = f64::INFINITY;
                    let mut sign_all = 1.0;
                    let mut sign_excl = 1.0;
                    for idx in graph.check_edge_range(c) {
                        let v = nu[idx];
                        let s = float::sgn(v);
                        sign_all *= s;
                        mag_all = mag_all.min(float::abs(v));
                        if idx != e {
                            sign_excl *= s;
                        }
                    }
                    mu = config.alpha
                        * float::sgn(g)
                        * sign_excl
                        * mag_all.min(float::abs(g));
                    if float::abs(g) < mag_all {
                        gamma[c] = if float::sgn(g) == sign_all {
                            float::sgn(g) * mag_all
                        } else {
                            -g
                        };
                    }
                } else {
                    // Trusted belief: behaves as a hard syndrome sign.
                    let mut magnitude = f64::INFINITY;
                    let mut sign = float::sgn(g);
                    for idx in graph.check_edge_range(c) {
                        if idx == e {
                            continue;
                        }
                        let v = nu[idx];
                        sign *= float::sgn(v);
                        magnitude = magnitude.min(float::abs(v));
                    }
                    mu = config.alpha * magnitude * sign;
                }
                mu_scratch[slot] = mu;
                posterior += mu;
            }
            lambda[b] = posterior;
            for (slot, &e) in edges.iter().enumerate() {
                nu[e as usize] = posterior - mu_scratch[slot];
            }
        }

        hard_decision(&lambda, &mut estimate);
        for (c, &g) in gamma.iter().enumerate() {
            target.set(c, g < 0.0);
        }
        if graph.syndrome_of(&estimate) == target {
            return SsmsaResult {
                decode: DecodeResult {
                    estimate,
                    converged: true,
                    iterations: iteration,
                    posteriors: lambda,
                },
                syndrome_beliefs: gamma,
            };
        }
    }
    SsmsaResult {
        decode: DecodeResult {
            estimate,
            converged: false,
            iterations: config.max_iter,
            posteriors: lambda,
        },
        syndrome_beliefs: gamma,
    }
}

/// Bit-to-check messages start at the bit priors.
fn init_messages(graph: &TannerGraph, priors: &[f64]) -> Vec<f64> {
    (0..graph.n_edges())
        .map(|e| priors[graph.bit_of_edge(e)])
        .collect()
}

fn max_bit_degree(graph: &TannerGraph) -> usize {
    (0..graph.n_bits())
        .map(|b| graph.edges_of_bit(b).len())
        .max()
        .unwrap_or(0)
}

/// A nonpositive posterior means the bit is more likely flipped than not.
fn hard_decision(lambda: &[f64], estimate: &mut BitVec) {
    for (b, &l) in lambda.iter().enumerate() {
        estimate.set(b, l <= 0.0);
    }
}
