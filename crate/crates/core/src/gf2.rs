//! Sparse GF(2) linear algebra.
//!
//! Parity-check matrices are stored row-major as sorted column-index lists
//! ([`SparseBitMatrix`]); vectors are dense packed-word bitsets ([`BitVec`]).
//! Row reduction, rank, and kernel computations run on a dense word-packed
//! mirror ([`WordMat`]) and convert back, which keeps elimination fast even
//! when fill-in would ruin a purely sparse pass.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Errors from shape-checked matrix assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    /// Two operands disagree on a dimension that must match.
    DimensionMismatch(String),
    /// A column index is out of range for the declared width.
    IndexOutOfRange { index: usize, cols: usize },
    /// A block row or block column contains no matrix to infer its size from.
    UnsizedBlock { block_row: usize, block_col: usize },
}

impl fmt::Display for Gf2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gf2Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Gf2Error::IndexOutOfRange { index, cols } => {
                write!(f, "column index {index} out of range (cols={cols})")
            }
            Gf2Error::UnsizedBlock { block_row, block_col } => write!(
                f,
                "block ({block_row}, {block_col}) has no sized neighbor to infer its shape from"
            ),
        }
    }
}

impl core::error::Error for Gf2Error {}

// ---------------------------------------------------------------------------
// BitVec
// ---------------------------------------------------------------------------

/// A dense bit vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    /// Creates a zero vector of the given length.
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    /// Creates a vector with ones exactly at `indices`.
    ///
    /// # Panics
    /// Panics if any index is `>= len`.
    #[must_use]
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    /// Number of bits.
    #[must_use]
    pub const fn len(&self) -> usize {
        self.len
    }

    /// True if the vector has zero length.
    #[must_use]
    pub const fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// True if every bit is zero.
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Returns bit `i`.
    ///
    /// # Panics
    /// Panics if `i >= len`.
    #[must_use]
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Sets bit `i` to `value`.
    ///
    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Flips bit `i`.
    ///
    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// XOR-assigns `other` into `self` (GF(2) addition).
    ///
    /// # Panics
    /// Panics if lengths differ.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor_assign length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Returns the Hamming weight.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Returns the concatenation `self || other`.
    #[must_use]
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Extracts bits `start..end` as a new vector.
    ///
    /// # Panics
    /// Panics if `start > end` or `end > len`.
    #[must_use]
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(
            start <= end && end <= self.len,
            "slice {start}..{end} out of range (len={})",
            self.len
        );
        let mut out = Self::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    /// Iterates over the indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut word = w;
            let base = wi * 64;
            core::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(base + bit)
            })
        })
    }

    /// Parity of the intersection with a sorted index list.
    #[must_use]
    pub(crate) fn parity_at(&self, indices: &[u32]) -> bool {
        let mut parity = false;
        for &i in indices {
            let i = i as usize;
            parity ^= (self.words[i / 64] >> (i % 64)) & 1 == 1;
        }
        parity
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(len={}, ones=[", self.len)?;
        for (k, i) in self.ones().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "])")
    }
}

// ---------------------------------------------------------------------------
// SparseBitMatrix
// ---------------------------------------------------------------------------

/// A sparse binary matrix stored as per-row sorted column-index lists.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseBitMatrix {
    row_supports: Vec<Vec<u32>>,
    cols: usize,
}

impl SparseBitMatrix {
    /// Creates an all-zero matrix.
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { row_supports: vec![Vec::new(); rows], cols }
    }

    /// Creates the n-by-n identity.
    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self {
            row_supports: (0..n).map(|i| vec![i as u32]).collect(),
            cols: n,
        }
    }

    /// Builds a matrix from per-row column-index lists.
    ///
    /// Indices are sorted and deduplicated (supports are sets).
    pub fn from_rows(rows: Vec<Vec<u32>>, cols: usize) -> Result<Self, Gf2Error> {
        let mut row_supports = rows;
        for support in &mut row_supports {
            support.sort_unstable();
            support.dedup();
            if let Some(&last) = support.last() {
                if last as usize >= cols {
                    return Err(Gf2Error::IndexOutOfRange { index: last as usize, cols });
                }
            }
        }
        Ok(Self { row_supports, cols })
    }

    /// Number of rows.
    #[must_use]
    pub fn rows(&self) -> usize {
        self.row_supports.len()
    }

    /// Number of columns.
    #[must_use]
    pub const fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored ones.
    #[must_use]
    pub fn nnz(&self) -> usize {
        self.row_supports.iter().map(Vec::len).sum()
    }

    /// The sorted column indices of row `r`.
    ///
    /// # Panics
    /// Panics if `r >= rows()`.
    #[must_use]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.row_supports[r]
    }

    /// Returns entry (r, c).
    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(c < self.cols, "column {c} out of range (cols={})", self.cols);
        self.row_supports[r].binary_search(&(c as u32)).is_ok()
    }

    /// Sets entry (r, c) to `value`.
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(c < self.cols, "column {c} out of range (cols={})", self.cols);
        let support = &mut self.row_supports[r];
        match support.binary_search(&(c as u32)) {
            Ok(pos) => {
                if !value {
                    support.remove(pos);
                }
            }
            Err(pos) => {
                if value {
                    support.insert(pos, c as u32);
                }
            }
        }
    }

    /// Returns the transpose.
    #[must_use]
    pub fn transpose(&self) -> Self {
        let mut row_supports = vec![Vec::new(); self.cols];
        for (r, support) in self.row_supports.iter().enumerate() {
            for &c in support {
                row_supports[c as usize].push(r as u32);
            }
        }
        Self { row_supports, cols: self.rows() }
    }

    /// Matrix-vector product `self * x` over GF(2).
    ///
    /// # Panics
    /// Panics if `x.len() != cols`.
    #[must_use]
    pub fn matvec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "matvec: vector length {} != cols {}", x.len(), self.cols);
        let mut out = BitVec::zeros(self.rows());
        for (r, support) in self.row_supports.iter().enumerate() {
            if x.parity_at(support) {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix product `self * other` over GF(2).
    ///
    /// # Panics
    /// Panics if `self.cols != other.rows`.
    #[must_use]
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols,
            other.rows(),
            "mul: left cols {} != right rows {}",
            self.cols,
            other.rows()
        );
        let mut row_supports = Vec::with_capacity(self.rows());
        let mut acc = BitVec::zeros(other.cols);
        for support in &self.row_supports {
            for w in &mut acc.words {
                *w = 0;
            }
            for &j in support {
                for &c in &other.row_supports[j as usize] {
                    acc.flip(c as usize);
                }
            }
            row_supports.push(acc.ones().map(|c| c as u32).collect());
        }
        Self { row_supports, cols: other.cols }
    }

    /// True if `self * other` is the zero matrix.
    #[must_use]
    pub fn mul_is_zero(&self, other: &Self) -> bool {
        self.mul(other).nnz() == 0
    }

    /// Kronecker product `self ⊗ other`.
    ///
    /// The result has `rows*other.rows` rows and `cols*other.cols` columns,
    /// with block (i, j) equal to `other` wherever `self[i, j] = 1`.
    #[must_use]
    pub fn kron(&self, other: &Self) -> Self {
        let bc = other.cols;
        let mut row_supports = Vec::with_capacity(self.rows() * other.rows());
        for a_support in &self.row_supports {
            for b_support in &other.row_supports {
                let mut support = Vec::with_capacity(a_support.len() * b_support.len());
                for &aj in a_support {
                    let base = aj as usize * bc;
                    for &bj in b_support {
                        support.push((base + bj as usize) as u32);
                    }
                }
                support.sort_unstable();
                row_supports.push(support);
            }
        }
        Self { row_supports, cols: self.cols * bc }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.rows() != other.rows() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "hstack: {} rows vs {} rows",
                self.rows(),
                other.rows()
            )));
        }
        let offset = self.cols as u32;
        let row_supports = self
            .row_supports
            .iter()
            .zip(&other.row_supports)
            .map(|(a, b)| {
                let mut support = a.clone();
                support.extend(b.iter().map(|&c| c + offset));
                support
            })
            .collect();
        Ok(Self { row_supports, cols: self.cols + other.cols })
    }

    /// Vertical concatenation `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "vstack: {} cols vs {} cols",
                self.cols, other.cols
            )));
        }
        let mut row_supports = self.row_supports.clone();
        row_supports.extend(other.row_supports.iter().cloned());
        Ok(Self { row_supports, cols: self.cols })
    }

    /// Assembles a block matrix from a grid of optional blocks.
    ///
    /// `None` entries are zero blocks; their shapes are inferred from sized
    /// blocks in the same block row and block column, which must exist and
    /// agree.
    pub fn block(grid: &[Vec<Option<&SparseBitMatrix>>]) -> Result<Self, Gf2Error> {
        let block_rows = grid.len();
        let block_cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|row| row.len() != block_cols) {
            return Err(Gf2Error::DimensionMismatch(
                "block: ragged block grid".into(),
            ));
        }

        let mut row_heights = vec![None; block_rows];
        let mut col_widths = vec![None; block_cols];
        for (bi, row) in grid.iter().enumerate() {
            for (bj, entry) in row.iter().enumerate() {
                if let Some(m) = entry {
                    match row_heights[bi] {
                        None => row_heights[bi] = Some(m.rows()),
                        Some(h) if h != m.rows() => {
                            return Err(Gf2Error::DimensionMismatch(format!(
                                "block row {bi}: heights {h} vs {}",
                                m.rows()
                            )))
                        }
                        _ => {}
                    }
                    match col_widths[bj] {
                        None => col_widths[bj] = Some(m.cols()),
                        Some(w) if w != m.cols() => {
                            return Err(Gf2Error::DimensionMismatch(format!(
                                "block col {bj}: widths {w} vs {}",
                                m.cols()
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        let row_heights: Vec<usize> = row_heights
            .into_iter()
            .enumerate()
            .map(|(bi, h)| h.ok_or(Gf2Error::UnsizedBlock { block_row: bi, block_col: 0 }))
            .collect::<Result<_, _>>()?;
        let col_widths: Vec<usize> = col_widths
            .into_iter()
            .enumerate()
            .map(|(bj, w)| w.ok_or(Gf2Error::UnsizedBlock { block_row: 0, block_col: bj }))
            .collect::<Result<_, _>>()?;

        let total_rows: usize = row_heights.iter().sum();
        let total_cols: usize = col_widths.iter().sum();
        let mut col_offsets = Vec::with_capacity(block_cols);
        let mut acc = 0usize;
        for &w in &col_widths {
            col_offsets.push(acc);
            acc += w;
        }

        let mut row_supports = Vec::with_capacity(total_rows);
        for (bi, row) in grid.iter().enumerate() {
            for local_r in 0..row_heights[bi] {
                let mut support = Vec::new();
                for (bj, entry) in row.iter().enumerate() {
                    if let Some(m) = entry {
                        let offset = col_offsets[bj] as u32;
                        support.extend(m.row_supports[local_r].iter().map(|&c| c + offset));
                    }
                }
                row_supports.push(support);
            }
        }
        Ok(Self { row_supports, cols: total_cols })
    }

    /// Full Gauss-Jordan reduction.
    ///
    /// Returns the reduced row echelon form `R`, the pivot columns in
    /// ascending order, and an invertible row transform `T` with
    /// `T * self == R`.
    #[must_use]
    pub fn row_reduce(&self) -> RowReduction {
        let m = self.rows();
        let n = self.cols;
        // Augment with the identity so the accumulated row operations land in T.
        let mut mat = WordMat::zeros(m, n + m);
        for (r, support) in self.row_supports.iter().enumerate() {
            for &c in support {
                mat.set(r, c as usize, true);
            }
            mat.set(r, n + r, true);
        }

        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..m).find(|&r| mat.get(r, c)) else {
                continue;
            };
            mat.swap_rows(p, rank);
            mat.eliminate_column(c, rank);
            pivot_cols.push(c);
            rank += 1;
            if rank == m {
                break;
            }
        }

        let mut reduced_rows = Vec::with_capacity(m);
        let mut transform_rows = Vec::with_capacity(m);
        for r in 0..m {
            reduced_rows.push(mat.row_support_range(r, 0, n));
            transform_rows.push(mat.row_support_range(r, n, n + m));
        }
        RowReduction {
            reduced: Self { row_supports: reduced_rows, cols: n },
            pivot_cols,
            row_transform: Self { row_supports: transform_rows, cols: m },
        }
    }

    /// Rank over GF(2).
    #[must_use]
    pub fn rank(&self) -> usize {
        let mut mat = WordMat::from_sparse(self);
        let m = self.rows();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m).find(|&r| mat.get(r, c)) else {
                continue;
            };
            mat.swap_rows(p, rank);
            mat.eliminate_column_below(c, rank);
            rank += 1;
            if rank == m {
                break;
            }
        }
        rank
    }

    /// A basis of the right kernel `{x : self * x = 0}`.
    #[must_use]
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let reduction = self.row_reduce();
        let reduced = &reduction.reduced;
        let pivots = &reduction.pivot_cols;
        let mut is_pivot = vec![false; self.cols];
        for &p in pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (i, &p) in pivots.iter().enumerate() {
                if reduced.get(i, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// The rows as dense bit vectors.
    #[must_use]
    pub fn to_dense_rows(&self) -> Vec<BitVec> {
        self.row_supports
            .iter()
            .map(|support| {
                let mut v = BitVec::zeros(self.cols);
                for &c in support {
                    v.set(c as usize, true);
                }
                v
            })
            .collect()
    }
}

impl fmt::Debug for SparseBitMatrix {
    /// Writes the matrix as a 0/1 grid; only sensible for small matrices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseBitMatrix({}x{})", self.rows(), self.cols)?;
        for r in 0..self.rows() {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of [`SparseBitMatrix::row_reduce`].
pub struct RowReduction {
    /// Reduced row echelon form.
    pub reduced: SparseBitMatrix,
    /// Pivot column indices, strictly increasing; `len()` is the rank.
    pub pivot_cols: Vec<usize>,
    /// Invertible transform with `row_transform * original == reduced`.
    pub row_transform: SparseBitMatrix,
}

// ---------------------------------------------------------------------------
// Echelon: incremental independence testing
// ---------------------------------------------------------------------------

/// Incremental row-echelon accumulator for rank-extension queries.
///
/// Rows are inserted one at a time; each insert reports whether the row was
/// independent of the span of everything inserted so far. Much cheaper than
/// re-running elimination from scratch when filtering a long candidate list.
pub(crate) struct Echelon {
    rows: Vec<Vec<u64>>,
    pivot_of: Vec<Option<usize>>,
    words: usize,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self { rows: Vec::new(), pivot_of: vec![None; cols], words: cols.div_ceil(64).max(1) }
    }

    /// Inserts `v` into the span; returns true if it was independent.
    ///
    /// # Panics
    /// Panics if `v` has more bits than the accumulator has columns.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let mut row = v.words().to_vec();
        row.resize(self.words, 0);
        loop {
            let Some(lead) = leading_bit(&row) else {
                return false;
            };
            match self.pivot_of[lead] {
                Some(r) => {
                    for (w, p) in row.iter_mut().zip(&self.rows[r]) {
                        *w ^= p;
                    }
                }
                None => {
                    self.pivot_of[lead] = Some(self.rows.len());
                    self.rows.push(row);
                    return true;
                }
            }
        }
    }

}

fn leading_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(wi, &w)| wi * 64 + w.trailing_zeros() as usize)
}

// ---------------------------------------------------------------------------
// WordMat: dense word-packed working matrix for elimination
// ---------------------------------------------------------------------------

/// Dense bit matrix packed into 64-bit words, used for Gaussian elimination.
pub(crate) struct WordMat {
    words: Vec<u64>,
    stride: usize,
    rows: usize,
}

impl WordMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        Self { words: vec![0; rows * stride], stride, rows }
    }

    pub fn from_sparse(m: &SparseBitMatrix) -> Self {
        let mut mat = Self::zeros(m.rows(), m.cols());
        for (r, support) in m.row_supports.iter().enumerate() {
            for &c in support {
                mat.set(r, c as usize, true);
            }
        }
        mat
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.words[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let idx = r * self.stride + c / 64;
        let mask = 1u64 << (c % 64);
        if value {
            self.words[idx] |= mask;
        } else {
            self.words[idx] &= !mask;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.words.swap(a * s + k, b * s + k);
        }
    }

    /// XORs the pivot row into every other row with a one in column `c`.
    pub fn eliminate_column(&mut self, c: usize, pivot_row: usize) {
        let s = self.stride;
        let pivot: Vec<u64> = self.row(pivot_row).to_vec();
        for r in 0..self.rows {
            if r != pivot_row && self.get(r, c) {
                let row = &mut self.words[r * s..(r + 1) * s];
                for (w, p) in row.iter_mut().zip(&pivot) {
                    *w ^= p;
                }
            }
        }
    }

    /// XORs the pivot row into rows below it with a one in column `c`.
    pub fn eliminate_column_below(&mut self, c: usize, pivot_row: usize) {
        let s = self.stride;
        let pivot: Vec<u64> = self.row(pivot_row).to_vec();
        for r in pivot_row + 1..self.rows {
            if self.get(r, c) {
                let row = &mut self.words[r * s..(r + 1) * s];
                for (w, p) in row.iter_mut().zip(&pivot) {
                    *w ^= p;
                }
            }
        }
    }

    /// XORs the pivot row into rows above it with a one in column `c`.
    pub fn eliminate_column_above(&mut self, c: usize, pivot_row: usize) {
        let s = self.stride;
        let pivot: Vec<u64> = self.row(pivot_row).to_vec();
        for r in 0..pivot_row {
            if self.get(r, c) {
                let row = &mut self.words[r * s..(r + 1) * s];
                for (w, p) in row.iter_mut().zip(&pivot) {
                    *w ^= p;
                }
            }
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Set-bit indices of row `r` inside `[lo, hi)`, shifted down by `lo`.
    pub fn row_support_range(&self, r: usize, lo: usize, hi: usize) -> Vec<u32> {
        let mut support = Vec::new();
        let row = self.row(r);
        for (wi, &w) in row.iter().enumerate() {
            let mut word = w;
            while word != 0 {
                let bit = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if bit >= lo && bit < hi {
                    support.push((bit - lo) as u32);
                }
            }
        }
        support
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: &[&[u8]]) -> SparseBitMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let supports = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v == 1)
                    .map(|(c, _)| c as u32)
                    .collect()
            })
            .collect();
        SparseBitMatrix::from_rows(supports, cols).unwrap()
    }

    /// Parity-check matrix of the [7,4] Hamming code, used as a worked example.
    fn hamming() -> SparseBitMatrix {
        dense(&[
            &[1, 0, 0, 1, 0, 1, 1],
            &[0, 1, 0, 1, 1, 0, 1],
            &[0, 0, 1, 0, 1, 1, 1],
        ])
    }

    #[test]
    fn matvec_single_column_reads_off_the_column() {
        let h = hamming();
        // Weight-one error on bit 3 (0-based): the syndrome is column 3.
        let e = BitVec::from_indices(7, &[3]);
        let s = h.matvec(&e);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn matvec_is_linear() {
        let h = hamming();
        let a = BitVec::from_indices(7, &[0, 2, 5]);
        let b = BitVec::from_indices(7, &[1, 2, 6]);
        let mut sum = a.clone();
        sum.xor_assign(&b);
        let mut lhs = h.matvec(&a);
        lhs.xor_assign(&h.matvec(&b));
        assert_eq!(lhs, h.matvec(&sum));
    }

    #[test]
    fn hamming_rank_and_kernel() {
        let h = hamming();
        assert_eq!(h.rank(), 3);
        let kernel = h.kernel_basis();
        assert_eq!(kernel.len(), 4);
        for k in &kernel {
            assert!(h.matvec(k).is_zero());
        }
    }

    #[test]
    fn row_reduce_identity_is_fixed_point() {
        let id = SparseBitMatrix::identity(5);
        let red = id.row_reduce();
        assert_eq!(red.reduced, id);
        assert_eq!(red.pivot_cols, vec![0, 1, 2, 3, 4]);
        assert_eq!(red.row_transform, SparseBitMatrix::identity(5));
    }

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        let z = SparseBitMatrix::zeros(3, 4);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().len(), 4);
    }

    #[test]
    fn rank_with_duplicate_rows() {
        let m = dense(&[&[1, 1, 0], &[1, 1, 0], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn kron_identity_blocks() {
        let i2 = SparseBitMatrix::identity(2);
        let h = dense(&[&[1, 1, 0], &[0, 1, 1]]);
        let k = i2.kron(&h);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.cols(), 6);
        assert!(k.get(0, 0) && k.get(0, 1));
        assert!(k.get(2, 3) && k.get(2, 4));
        assert!(!k.get(0, 3));
    }

    #[test]
    fn hstack_vstack_shapes_and_errors() {
        let a = dense(&[&[1, 0], &[0, 1]]);
        let b = dense(&[&[1, 1], &[1, 0]]);
        let h = a.hstack(&b).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 4));
        assert!(h.get(0, 0) && h.get(0, 2) && h.get(0, 3));
        let v = a.vstack(&b).unwrap();
        assert_eq!((v.rows(), v.cols()), (4, 2));
        let tall = SparseBitMatrix::zeros(3, 2);
        assert!(a.hstack(&tall).is_err());
        let wide = SparseBitMatrix::zeros(2, 3);
        assert!(a.vstack(&wide).is_err());
    }

    #[test]
    fn block_infers_zero_shapes() {
        let h = dense(&[&[1, 1, 0], &[0, 1, 1]]);
        let i2 = SparseBitMatrix::identity(2);
        let m = dense(&[&[1, 1]]);
        // [[H, I], [0, M]]
        let b = SparseBitMatrix::block(&[
            vec![Some(&h), Some(&i2)],
            vec![None, Some(&m)],
        ])
        .unwrap();
        assert_eq!((b.rows(), b.cols()), (3, 5));
        assert!(b.get(0, 0) && b.get(0, 3) && b.get(2, 3) && b.get(2, 4));
        assert!(!b.get(2, 0));
    }

    #[test]
    fn block_rejects_unsized_and_mismatched() {
        let h = dense(&[&[1, 1, 0], &[0, 1, 1]]);
        let err = SparseBitMatrix::block(&[vec![Some(&h), None], vec![None, None]]);
        assert!(matches!(err, Err(Gf2Error::UnsizedBlock { .. })));
        let m = dense(&[&[1, 1]]);
        let err = SparseBitMatrix::block(&[vec![Some(&h)], vec![Some(&m)]]);
        assert!(matches!(err, Err(Gf2Error::DimensionMismatch(_))));
    }

    #[test]
    fn transpose_involution() {
        let h = hamming();
        assert_eq!(h.transpose().transpose(), h);
    }

    #[test]
    fn mul_against_known_product() {
        let a = dense(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = dense(&[&[1, 0], &[1, 1], &[0, 1]]);
        let p = a.mul(&b);
        // [[1+1, 0+1], [1+0, 1+1]] = [[0,1],[1,0]]
        assert_eq!(p, dense(&[&[0, 1], &[1, 0]]));
    }

    fn arb_matrix() -> impl Strategy<Value = SparseBitMatrix> {
        (1usize..8, 1usize..10).prop_flat_map(|(rows, cols)| {
            proptest::collection::vec(
                proptest::collection::vec(0u32..cols as u32, 0..cols),
                rows,
            )
            .prop_map(move |supports| SparseBitMatrix::from_rows(supports, cols).unwrap())
        })
    }

    proptest! {
        #[test]
        fn row_reduce_contract(m in arb_matrix()) {
            let red = m.row_reduce();
            // T * M == R
            prop_assert_eq!(red.row_transform.mul(&m), red.reduced.clone());
            // T invertible: full rank
            prop_assert_eq!(red.row_transform.rank(), m.rows());
            // pivots strictly increasing and pivot columns are unit vectors
            for (i, &p) in red.pivot_cols.iter().enumerate() {
                if i > 0 {
                    prop_assert!(red.pivot_cols[i - 1] < p);
                }
                for r in 0..m.rows() {
                    prop_assert_eq!(red.reduced.get(r, p), r == i);
                }
            }
        }

        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let kernel = m.kernel_basis();
            prop_assert_eq!(m.rank() + kernel.len(), m.cols());
            for k in &kernel {
                prop_assert!(m.matvec(k).is_zero());
            }
        }

        #[test]
        fn kron_respects_products(a in arb_matrix(), b in arb_matrix()) {
            let k = a.kron(&b);
            prop_assert_eq!(k.rows(), a.rows() * b.rows());
            prop_assert_eq!(k.cols(), a.cols() * b.cols());
            // (A ⊗ B)(x ⊗ y) == (A x) ⊗ (B y) for basis-ish vectors
            let x = BitVec::from_indices(a.cols(), &[0]);
            let y = BitVec::from_indices(b.cols(), &[b.cols() - 1]);
            let mut xy = BitVec::zeros(k.cols());
            for xi in x.ones() {
                for yi in y.ones() {
                    xy.set(xi * b.cols() + yi, true);
                }
            }
            let ax = a.matvec(&x);
            let by = b.matvec(&y);
            let mut expect = BitVec::zeros(k.rows());
            for ai in ax.ones() {
                for bi in by.ones() {
                    expect.set(ai * b.rows() + bi, true);
                }
            }
            prop_assert_eq!(k.matvec(&xy), expect);
        }
    }
}
