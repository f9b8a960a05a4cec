//! Ordered-statistics post-processing.
//!
//! When message passing stalls, its posteriors still rank the bits by
//! reliability. Sorting columns by posterior (most-likely-flipped first,
//! ties by index) and eliminating over that order yields an information set
//! on which `H e = s` can be solved exactly; the free bits are either left
//! at zero (order 0) or swept over single and pairwise flips, keeping the
//! solution of least soft weight.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gf2::{BitVec, WordMat};

use super::{OsdMethod, TannerGraph};

/// Failure of the ordered-statistics stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsdError {
    /// The target syndrome is not in the image of the check matrix, so no
    /// error pattern can explain it.
    SyndromeOutsideImage,
}

impl fmt::Display for OsdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OsdError::SyndromeOutsideImage => {
                write!(f, "target syndrome is outside the image of the check matrix")
            }
        }
    }
}

impl core::error::Error for OsdError {}

/// Solves `H e = syndrome` on the most reliable information set.
///
/// `posteriors` are the message-passing output LLRs; the soft weight of a
/// candidate solution is the sum of the signed posteriors over its support,
/// and the sweep keeps the candidate of least soft weight (first encountered
/// on ties: the all-zero free assignment, then single flips by position,
/// then pairs in lexicographic order).
///
/// # Panics
/// Panics if `posteriors` or `syndrome` lengths disagree with the graph.
pub fn osd_postprocess(
    graph: &TannerGraph,
    posteriors: &[f64],
    syndrome: &BitVec,
    method: OsdMethod,
    osd_order: usize,
) -> Result<BitVec, OsdError> {
    let n = graph.n_bits();
    let m = graph.n_checks();
    assert_eq!(posteriors.len(), n, "one posterior per bit");
    assert_eq!(syndrome.len(), m, "one syndrome bit per check");

    // Most likely flipped first: ascending signed posterior, ties by index.
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        posteriors[a as usize]
            .total_cmp(&posteriors[b as usize])
            .then(a.cmp(&b))
    });
    let mut position_of = vec![0u32; n];
    for (pos, &col) in order.iter().enumerate() {
        position_of[col as usize] = pos as u32;
    }

    // Permuted check matrix with the syndrome as an extra trailing column.
    let mut mat = WordMat::zeros(m, n + 1);
    for c in 0..m {
        for &b in graph.check_bits(c) {
            mat.set(c, position_of[b as usize] as usize, true);
        }
        if syndrome.get(c) {
            mat.set(c, n, true);
        }
    }

    // Forward elimination over the sorted columns.
    let mut pivots: Vec<u32> = Vec::new();
    for pos in 0..n {
        let rank = pivots.len();
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| mat.get(r, pos)) else {
            continue;
        };
        mat.swap_rows(p, rank);
        mat.eliminate_column_below(pos, rank);
        pivots.push(pos as u32);
    }
    let rank = pivots.len();

    // Rows beyond the rank are zero in every matrix column; a syndrome bit
    // surviving there certifies the syndrome is outside the image.
    for r in rank..m {
        if mat.get(r, n) {
            return Err(OsdError::SyndromeOutsideImage);
        }
    }

    // Back substitution puts the pivot block in reduced form.
    for (i, &pc) in pivots.iter().enumerate().rev() {
        mat.eliminate_column_above(pc as usize, i);
    }

    // Base solution on the information set: free bits zero.
    let mut base = vec![0u64; rank.div_ceil(64).max(1)];
    for (i, word) in base.iter_mut().enumerate() {
        for bit in 0..64 {
            let r = i * 64 + bit;
            if r < rank && mat.get(r, n) {
                *word |= 1 << bit;
            }
        }
    }
    let pivot_posteriors: Vec<f64> = pivots
        .iter()
        .map(|&pos| posteriors[order[pos as usize] as usize])
        .collect();

    let mut best_free: Vec<u32> = Vec::new();
    let mut best_solution = base.clone();
    if method == OsdMethod::CombinationSweep {
        let free_positions: Vec<u32> = {
            let mut is_pivot = vec![false; n];
            for &pos in &pivots {
                is_pivot[pos as usize] = true;
            }
            (0..n as u32).filter(|&pos| !is_pivot[pos as usize]).collect()
        };
        // Reduced free columns, restricted to the pivot rows.
        let free_columns: Vec<Vec<u64>> = free_positions
            .iter()
            .map(|&pos| {
                let mut col = vec![0u64; base.len()];
                for (r, word) in col.iter_mut().enumerate().map(|(i, w)| (i * 64, w)) {
                    for bit in 0..64 {
                        if r + bit < rank && mat.get(r + bit, pos as usize) {
                            *word |= 1 << bit;
                        }
                    }
                }
                col
            })
            .collect();
        let free_posteriors: Vec<f64> = free_positions
            .iter()
            .map(|&pos| posteriors[order[pos as usize] as usize])
            .collect();

        let weight_of = |solution: &[u64], flipped: &[u32]| -> f64 {
            let mut w = soft_weight(solution, &pivot_posteriors);
            for &j in flipped {
                w += free_posteriors[j as usize];
            }
            w
        };

        let mut best_weight = weight_of(&base, &[]);
        let mut scratch = vec![0u64; base.len()];
        let consider = |flipped: &[u32],
                            scratch: &mut Vec<u64>,
                            best_weight: &mut f64,
                            best_free: &mut Vec<u32>,
                            best_solution: &mut Vec<u64>| {
            scratch.copy_from_slice(&base);
            for &j in flipped {
                for (w, f) in scratch.iter_mut().zip(&free_columns[j as usize]) {
                    *w ^= f;
                }
            }
            let w = weight_of(scratch, flipped);
            if w < *best_weight {
                *best_weight = w;
                *best_free = flipped.to_vec();
                best_solution.copy_from_slice(scratch);
            }
        };

        for j in 0..free_positions.len() as u32 {
            consider(&[j], &mut scratch, &mut best_weight, &mut best_free, &mut best_solution);
        }
        let sweep = free_positions.len().min(osd_order);
        for j1 in 0..sweep as u32 {
            for j2 in j1 + 1..sweep as u32 {
                consider(
                    &[j1, j2],
                    &mut scratch,
                    &mut best_weight,
                    &mut best_free,
                    &mut best_solution,
                );
            }
        }

        let mut estimate = BitVec::zeros(n);
        for (i, &pos) in pivots.iter().enumerate() {
            if (best_solution[i / 64] >> (i % 64)) & 1 == 1 {
                estimate.set(order[pos as usize] as usize, true);
            }
        }
        for &j in &best_free {
            estimate.set(order[free_positions[j as usize] as usize] as usize, true);
        }
        return Ok(estimate);
    }

    let mut estimate = BitVec::zeros(n);
    for (i, &pos) in pivots.iter().enumerate() {
        if (best_solution[i / 64] >> (i % 64)) & 1 == 1 {
            estimate.set(order[pos as usize] as usize, true);
        }
    }
    Ok(estimate)
}

/// Sum of the pivot posteriors over the set bits of `solution`.
fn soft_weight(solution: &[u64], pivot_posteriors: &[f64]) -> f64 {
    let mut w = 0.0;
    for (wi, &word) in solution.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let i = wi * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            w += pivot_posteriors[i];
        }
    }
    w
}
