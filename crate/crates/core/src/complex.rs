//! Chain complexes over GF(2) and their tensor products.
//!
//! A length-`d` chain complex is a sequence of boundary maps
//! `∂_k : C_k → C_{k-1}` (for `k = 1..=d`) with `∂_{k-1} ∘ ∂_k = 0`. CSS
//! codes arise from three consecutive levels: one boundary map supplies the
//! Z-type checks, the transpose of the next supplies the X-type checks, and a
//! fourth level (when present) supplies metachecks on the X syndrome.
//!
//! Tensor products of small 1D complexes build the higher-dimensional codes.
//! At level `k` the product complex is the direct sum of `A_i ⊗ B_j` over
//! `i + j = k`; summands are ordered by decreasing left-factor degree, and
//! the same order fixes the row and column layout of every boundary matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::gf2::SparseBitMatrix;

/// Errors from chain-complex construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    /// No boundary maps were supplied.
    Empty,
    /// Consecutive boundary maps have incompatible shapes.
    ChainMismatch(String),
    /// A composite `∂_{k-1} ∘ ∂_k` is nonzero.
    NotAComplex { level: usize },
}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::Empty => write!(f, "chain complex needs at least one boundary map"),
            ComplexError::ChainMismatch(msg) => write!(f, "chain mismatch: {msg}"),
            ComplexError::NotAComplex { level } => {
                write!(f, "boundary composition at level {level} is nonzero")
            }
        }
    }
}

impl core::error::Error for ComplexError {}

/// A finite chain complex of GF(2) vector spaces.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    /// `boundaries[k]` is `∂_{k+1} : C_{k+1} → C_k`.
    boundaries: Vec<SparseBitMatrix>,
}

impl ChainComplex {
    /// Builds a complex from boundary maps ordered `∂_1, ∂_2, ...`.
    ///
    /// Verifies that shapes chain and that consecutive compositions vanish.
    pub fn new(boundaries: Vec<SparseBitMatrix>) -> Result<Self, ComplexError> {
        if boundaries.is_empty() {
            return Err(ComplexError::Empty);
        }
        for k in 1..boundaries.len() {
            if boundaries[k - 1].cols() != boundaries[k].rows() {
                return Err(ComplexError::ChainMismatch(format!(
                    "∂_{k} has {} columns but ∂_{} has {} rows",
                    boundaries[k - 1].cols(),
                    k + 1,
                    boundaries[k].rows()
                )));
            }
            if !boundaries[k - 1].mul_is_zero(&boundaries[k]) {
                return Err(ComplexError::NotAComplex { level: k });
            }
        }
        Ok(Self { boundaries })
    }

    /// A two-level complex `C_1 → C_0` from a single boundary map.
    #[must_use]
    pub fn two_level(boundary: SparseBitMatrix) -> Self {
        Self { boundaries: alloc::vec![boundary] }
    }

    /// The top level index `d` (the complex has levels `0..=d`).
    #[must_use]
    pub fn length(&self) -> usize {
        self.boundaries.len()
    }

    /// Dimension of `C_k`.
    ///
    /// # Panics
    /// Panics if `k > length()`.
    #[must_use]
    pub fn dim(&self, k: usize) -> usize {
        if k == 0 {
            self.boundaries[0].rows()
        } else {
            self.boundaries[k - 1].cols()
        }
    }

    /// The boundary map `∂_k : C_k → C_{k-1}`.
    ///
    /// # Panics
    /// Panics if `k` is 0 or greater than `length()`.
    #[must_use]
    pub fn boundary(&self, k: usize) -> &SparseBitMatrix {
        assert!(k >= 1 && k <= self.length(), "no boundary map ∂_{k}");
        &self.boundaries[k - 1]
    }

    /// Dimension of the homology group `H_k = ker ∂_k / im ∂_{k+1}`.
    #[must_use]
    pub fn homology_dim(&self, k: usize) -> usize {
        let rank_out = if k == 0 { 0 } else { self.boundary(k).rank() };
        let rank_in = if k == self.length() { 0 } else { self.boundary(k + 1).rank() };
        self.dim(k) - rank_out - rank_in
    }

    /// Tensor product of two complexes.
    ///
    /// Level `k` of the product is `⊕_{i+j=k} A_i ⊗ B_j` with summands
    /// ordered by decreasing `i`. Within a summand, the element
    /// `a ⊗ b` sits at index `a * dim(B_j) + b`. The boundary restricted to
    /// `A_i ⊗ B_j` is `∂A ⊗ I` into `A_{i-1} ⊗ B_j` plus `I ⊗ ∂B` into
    /// `A_i ⊗ B_{j-1}`; over GF(2) no sign bookkeeping is needed, and the
    /// mixed second-order terms cancel in pairs, so the result is again a
    /// complex.
    #[must_use]
    pub fn tensor(&self, other: &Self) -> Self {
        let la = self.length();
        let lb = other.length();
        let summands = |k: usize| -> Vec<(usize, usize)> {
            let lo = k.saturating_sub(lb);
            let hi = core::cmp::min(la, k);
            (lo..=hi).rev().map(|i| (i, k - i)).collect()
        };

        let mut boundaries = Vec::with_capacity(la + lb);
        for k in 1..=la + lb {
            let sources = summands(k);
            let targets = summands(k - 1);
            let mut owned: Vec<Vec<Option<SparseBitMatrix>>> = targets
                .iter()
                .map(|_| sources.iter().map(|_| None).collect())
                .collect();
            for (bj, &(si, sj)) in sources.iter().enumerate() {
                for (bi, &(ti, tj)) in targets.iter().enumerate() {
                    if ti + 1 == si && tj == sj {
                        let id = SparseBitMatrix::identity(other.dim(sj));
                        owned[bi][bj] = Some(self.boundary(si).kron(&id));
                    } else if ti == si && tj + 1 == sj {
                        let id = SparseBitMatrix::identity(self.dim(si));
                        owned[bi][bj] = Some(id.kron(other.boundary(sj)));
                    }
                }
            }
            let grid: Vec<Vec<Option<&SparseBitMatrix>>> = owned
                .iter()
                .map(|row| row.iter().map(Option::as_ref).collect())
                .collect();
            boundaries.push(
                SparseBitMatrix::block(&grid)
                    .expect("tensor product blocks always have sized rows and columns"),
            );
        }
        Self::new(boundaries).expect("tensor product of complexes is a complex")
    }
}

/// The circle: `L` edges on `L` vertices, boundary `I + P` for the cyclic
/// shift `P`.
///
/// # Panics
/// Panics if `len < 2`.
#[must_use]
pub fn ring_chain(len: usize) -> ChainComplex {
    assert!(len >= 2, "ring chain needs at least 2 cells");
    let rows = (0..len)
        .map(|i| alloc::vec![i as u32, ((i + 1) % len) as u32])
        .collect();
    let boundary = SparseBitMatrix::from_rows(rows, len)
        .expect("ring chain indices are in range")
        .transpose();
    ChainComplex::two_level(boundary)
}

/// The interval: `len - 1` edges on `len` vertices.
///
/// Contractible, so `H_0` is one-dimensional and `H_1` vanishes; tensor
/// factors of this shape contribute geometry but no logical content.
///
/// # Panics
/// Panics if `len < 2`.
#[must_use]
pub fn interval_chain(len: usize) -> ChainComplex {
    assert!(len >= 2, "interval chain needs at least 2 vertices");
    let rows = (0..len - 1)
        .map(|i| alloc::vec![i as u32, i as u32 + 1])
        .collect();
    let boundary = SparseBitMatrix::from_rows(rows, len)
        .expect("interval chain indices are in range")
        .transpose();
    ChainComplex::two_level(boundary)
}

/// The interval with both endpoints removed (a repetition code's check
/// matrix read as a boundary map `C_1 → C_0` with `len` edges on `len - 1`
/// inner vertices).
///
/// Here `H_1` is one-dimensional (the all-ones vector) and `H_0` vanishes;
/// this factor carries the logical qubit of an open-boundary product code.
///
/// # Panics
/// Panics if `len < 2`.
#[must_use]
pub fn dual_interval_chain(len: usize) -> ChainComplex {
    assert!(len >= 2, "dual interval chain needs at least 2 edges");
    let rows = (0..len - 1)
        .map(|i| alloc::vec![i as u32, i as u32 + 1])
        .collect();
    let boundary =
        SparseBitMatrix::from_rows(rows, len).expect("dual interval chain indices are in range");
    ChainComplex::two_level(boundary)
}
