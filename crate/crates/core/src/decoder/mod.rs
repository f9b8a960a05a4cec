//! Belief-propagation decoders with ordered-statistics post-processing.
//!
//! Two message-passing decoders share one serial (bit-sequential) schedule:
//!
//! - [`min_sum_decode`]: normalized min-sum against a hard syndrome,
//! - [`ssmsa_decode`]: soft-syndrome min-sum, which treats each syndrome bit
//!   as an unreliable observation with its own log-likelihood ratio and
//!   updates that belief during decoding.
//!
//! When message passing fails to satisfy its working syndrome,
//! [`osd_postprocess`] solves for an exact solution on the most reliable
//! information set (ordered-statistics decoding, order 0 or with a
//! combination sweep). [`decode_hard`] and [`decode_soft`] bundle the two
//! stages.

mod min_sum;
mod osd;

pub use min_sum::{min_sum_decode, ssmsa_decode, SsmsaResult};
pub use osd::{osd_postprocess, OsdError};

use alloc::vec::Vec;

use crate::gf2::{BitVec, SparseBitMatrix};

/// Ordered-statistics post-processing flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsdMethod {
    /// Solve on the information set, leave all free bits at zero.
    Zero,
    /// Additionally sweep single flips over every free bit and double flips
    /// within the first `osd_order` free bits, keeping the lightest solution.
    CombinationSweep,
}

/// Decoder parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    /// Maximum number of full message-passing sweeps.
    pub max_iter: usize,
    /// Min-sum normalization factor applied to check-message magnitudes.
    pub alpha: f64,
    /// Soft-syndrome trust threshold: syndrome beliefs with magnitude above
    /// this are treated as hard bits.
    pub gamma: f64,
    /// Optional ordered-statistics stage on message-passing failure.
    pub osd: Option<OsdMethod>,
    /// Number of leading free bits covered by the combination sweep.
    pub osd_order: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { max_iter: 100, alpha: 0.6, gamma: 5.0, osd: None, osd_order: 10 }
    }
}

/// Result of a message-passing decode.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Hard-decision error estimate.
    pub estimate: BitVec,
    /// Whether the estimate satisfied the working syndrome.
    pub converged: bool,
    /// Completed sweeps (equals `max_iter` when not converged).
    pub iterations: usize,
    /// Posterior log-likelihood ratios, one per bit.
    pub posteriors: Vec<f64>,
}

/// Combined outcome of message passing plus optional post-processing.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    /// Final error estimate.
    pub estimate: BitVec,
    /// Whether message passing alone converged.
    pub bp_converged: bool,
    /// Completed message-passing sweeps.
    pub iterations: usize,
    /// Whether ordered statistics ran.
    pub osd_applied: bool,
    /// The syndrome the decoder ultimately solved for. For soft-syndrome
    /// decoding this is the thresholded final syndrome belief, which may
    /// differ from the thresholded input.
    pub target_syndrome: BitVec,
    /// Whether `H * estimate == target_syndrome`.
    pub satisfied: bool,
    /// Posterior log-likelihood ratios from message passing.
    pub posteriors: Vec<f64>,
}

/// Decodes a hard syndrome: min-sum, then ordered statistics if enabled.
#[must_use]
pub fn decode_hard(
    graph: &TannerGraph,
    priors: &[f64],
    syndrome: &BitVec,
    config: &DecoderConfig,
) -> DecodeOutcome {
    let bp = min_sum_decode(graph, priors, syndrome, config);
    finish(graph, bp, syndrome.clone(), config)
}

/// Decodes a soft syndrome given as per-check log-likelihood ratios.
///
/// Ordered statistics, when it runs, solves for the thresholded final
/// syndrome beliefs rather than the thresholded input.
#[must_use]
pub fn decode_soft(
    graph: &TannerGraph,
    priors: &[f64],
    syndrome_llrs: &[f64],
    config: &DecoderConfig,
) -> DecodeOutcome {
    let SsmsaResult { decode, syndrome_beliefs } =
        ssmsa_decode(graph, priors, syndrome_llrs, config);
    let mut target = BitVec::zeros(graph.n_checks());
    for (c, &g) in syndrome_beliefs.iter().enumerate() {
        if g < 0.0 {
            target.set(c, true);
        }
    }
    finish(graph, decode, target, config)
}

fn finish(
    graph: &TannerGraph,
    bp: DecodeResult,
    target: BitVec,
    config: &DecoderConfig,
) -> DecodeOutcome {
    if bp.converged {
        return DecodeOutcome {
            estimate: bp.estimate,
            bp_converged: true,
            iterations: bp.iterations,
            osd_applied: false,
            target_syndrome: target,
            satisfied: true,
            posteriors: bp.posteriors,
        };
    }
    let Some(method) = config.osd else {
        return DecodeOutcome {
            estimate: bp.estimate,
            bp_converged: false,
            iterations: bp.iterations,
            osd_applied: false,
            target_syndrome: target,
            satisfied: false,
            posteriors: bp.posteriors,
        };
    };
    match osd_postprocess(graph, &bp.posteriors, &target, method, config.osd_order) {
        Ok(estimate) => DecodeOutcome {
            estimate,
            bp_converged: false,
            iterations: bp.iterations,
            osd_applied: true,
            target_syndrome: target,
            satisfied: true,
            posteriors: bp.posteriors,
        },
        Err(OsdError::SyndromeOutsideImage) => DecodeOutcome {
            estimate: bp.estimate,
            bp_converged: false,
            iterations: bp.iterations,
            osd_applied: true,
            target_syndrome: target,
            satisfied: false,
            posteriors: bp.posteriors,
        },
    }
}

// ---------------------------------------------------------------------------
// Tanner graph
// ---------------------------------------------------------------------------

/// Bipartite check/bit adjacency of a parity-check matrix, in a layout
/// suited to serial message passing.
///
/// Edges are numbered check-major: edge `e` connects check
/// `check_of_edge(e)` to bit `check_bits[e]`, and a check's edges are
/// contiguous. A bit-major index maps each bit to its edge ids.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    n_bits: usize,
    check_offsets: Vec<u32>,
    check_bits: Vec<u32>,
    edge_check: Vec<u32>,
    bit_offsets: Vec<u32>,
    bit_edges: Vec<u32>,
}

impl TannerGraph {
    /// Builds the adjacency of `h`.
    ///
    /// # Panics
    /// Panics if any check has degree below 2: such checks make the
    /// leave-one-out minimum in min-sum undefined, and none of the
    /// parity-check constructions here produce them.
    #[must_use]
    pub fn new(h: &SparseBitMatrix) -> Self {
        let n_bits = h.cols();
        let n_checks = h.rows();
        let mut check_offsets = Vec::with_capacity(n_checks + 1);
        let mut check_bits = Vec::new();
        let mut edge_check = Vec::new();
        check_offsets.push(0);
        for c in 0..n_checks {
            let row = h.row(c);
            assert!(row.len() >= 2, "check {c} has degree {} < 2", row.len());
            check_bits.extend_from_slice(row);
            edge_check.extend(core::iter::repeat(c as u32).take(row.len()));
            check_offsets.push(check_bits.len() as u32);
        }

        let mut degree = alloc::vec![0u32; n_bits];
        for &b in &check_bits {
            degree[b as usize] += 1;
        }
        let mut bit_offsets = Vec::with_capacity(n_bits + 1);
        bit_offsets.push(0u32);
        for b in 0..n_bits {
            bit_offsets.push(bit_offsets[b] + degree[b]);
        }
        let mut cursor: Vec<u32> = bit_offsets[..n_bits].to_vec();
        let mut bit_edges = alloc::vec![0u32; check_bits.len()];
        for (e, &b) in check_bits.iter().enumerate() {
            bit_edges[cursor[b as usize] as usize] = e as u32;
            cursor[b as usize] += 1;
        }

        Self { n_bits, check_offsets, check_bits, edge_check, bit_offsets, bit_edges }
    }

    /// Number of bit (column) nodes.
    #[must_use]
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Number of check (row) nodes.
    #[must_use]
    pub fn n_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    /// Number of edges.
    #[must_use]
    pub fn n_edges(&self) -> usize {
        self.check_bits.len()
    }

    /// Edge id range of check `c`.
    #[inline]
    pub(crate) fn check_edge_range(&self, c: usize) -> core::ops::Range<usize> {
        self.check_offsets[c] as usize..self.check_offsets[c + 1] as usize
    }

    /// The bit at the far end of edge `e`.
    #[inline]
    pub(crate) fn bit_of_edge(&self, e: usize) -> usize {
        self.check_bits[e] as usize
    }

    /// The check at the near end of edge `e`.
    #[inline]
    pub(crate) fn check_of_edge(&self, e: usize) -> usize {
        self.edge_check[e] as usize
    }

    /// Edge ids incident to bit `b`.
    #[inline]
    pub(crate) fn edges_of_bit(&self, b: usize) -> &[u32] {
        &self.bit_edges[self.bit_offsets[b] as usize..self.bit_offsets[b + 1] as usize]
    }

    /// The bits of check `c`.
    #[inline]
    pub(crate) fn check_bits(&self, c: usize) -> &[u32] {
        &self.check_bits[self.check_edge_range(c)]
    }

    /// Computes `H * estimate` directly from the adjacency.
    ///
    /// # Panics
    /// Panics if `estimate.len() != n_bits()`.
    #[must_use]
    pub fn syndrome_of(&self, estimate: &BitVec) -> BitVec {
        assert_eq!(estimate.len(), self.n_bits);
        let mut s = BitVec::zeros(self.n_checks());
        for c in 0..self.n_checks() {
            let mut parity = false;
            for &b in self.check_bits(c) {
                parity ^= estimate.get(b as usize);
            }
            if parity {
                s.set(c, true);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::SparseBitMatrix;

    fn h_chain() -> SparseBitMatrix {
        SparseBitMatrix::from_rows(
            alloc::vec![alloc::vec![0, 1], alloc::vec![1, 2], alloc::vec![2, 3]],
            4,
        )
        .unwrap()
    }

    #[test]
    fn graph_adjacency_round_trip() {
        let h = h_chain();
        let g = TannerGraph::new(&h);
        assert_eq!(g.n_bits(), 4);
        assert_eq!(g.n_checks(), 3);
        assert_eq!(g.n_edges(), 6);
        assert_eq!(g.check_bits(1), &[1, 2]);
        // Bit 1 touches checks 0 and 1.
        let checks: Vec<usize> = g
            .edges_of_bit(1)
            .iter()
            .map(|&e| g.check_of_edge(e as usize))
            .collect();
        assert_eq!(checks, alloc::vec![0, 1]);
        for &e in g.edges_of_bit(2) {
            assert_eq!(g.bit_of_edge(e as usize), 2);
        }
    }

    #[test]
    fn syndrome_of_matches_matvec() {
        let h = h_chain();
        let g = TannerGraph::new(&h);
        let e = BitVec::from_indices(4, &[1, 3]);
        assert_eq!(g.syndrome_of(&e), h.matvec(&e));
    }

    #[test]
    #[should_panic(expected = "degree")]
    fn rejects_degree_one_checks() {
        let h = SparseBitMatrix::from_rows(alloc::vec![alloc::vec![0]], 2).unwrap();
        let _ = TannerGraph::new(&h);
    }
}
