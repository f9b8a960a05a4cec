//! CSS code constructions: 3D surface/toric codes and lifted-product codes.
//!
//! A CSS code is stored as its two check matrices `hx` (X-type stabilizers,
//! which detect Z errors) and `hz` (Z-type stabilizers, which detect X
//! errors), optional metacheck matrices acting on each syndrome, and paired
//! logical operator bases. All constructions validate the CSS orthogonality
//! and metacheck conditions on assembly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::complex::{dual_interval_chain, interval_chain, ring_chain, ChainComplex};
use crate::gf2::{BitVec, Echelon, SparseBitMatrix};

/// Errors from CSS code assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    /// `hx * hzᵀ != 0`.
    CssOrthogonality,
    /// A metacheck matrix does not annihilate its check matrix.
    MetaOrthogonality,
    /// Shapes of the supplied matrices are inconsistent.
    ShapeMismatch(String),
    /// The logical pairing matrix was singular.
    DegeneratePairing,
    /// A construction parameter is out of range.
    BadParameter(String),
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::CssOrthogonality => write!(f, "hx * hz^T is nonzero"),
            CodeError::MetaOrthogonality => {
                write!(f, "metacheck matrix does not annihilate its check matrix")
            }
            CodeError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            CodeError::DegeneratePairing => write!(f, "logical pairing matrix is singular"),
            CodeError::BadParameter(msg) => write!(f, "bad parameter: {msg}"),
        }
    }
}

impl core::error::Error for CodeError {}

/// A CSS quantum code with optional metachecks and paired logical bases.
#[derive(Debug, Clone)]
pub struct CssCode {
    /// X-type stabilizer checks; `hx * e_z` is the X syndrome of a Z error.
    pub hx: SparseBitMatrix,
    /// Z-type stabilizer checks; `hz * e_x` is the Z syndrome of an X error.
    pub hz: SparseBitMatrix,
    /// Metachecks on the X syndrome: `meta_x * hx = 0`.
    pub meta_x: Option<SparseBitMatrix>,
    /// Metachecks on the Z syndrome: `meta_z * hz = 0`.
    pub meta_z: Option<SparseBitMatrix>,
    /// X-type logical operators, one row per logical qubit.
    pub lx: SparseBitMatrix,
    /// Z-type logical operators, paired so that `lx * lzᵀ = I`.
    pub lz: SparseBitMatrix,
}

impl CssCode {
    /// Assembles a code from its check matrices, deriving logical bases.
    ///
    /// Verifies CSS orthogonality and metacheck conditions, extracts paired
    /// logical operator bases, and checks `lx * lzᵀ = I`.
    pub fn new(
        hx: SparseBitMatrix,
        hz: SparseBitMatrix,
        meta_x: Option<SparseBitMatrix>,
        meta_z: Option<SparseBitMatrix>,
    ) -> Result<Self, CodeError> {
        if hx.cols() != hz.cols() {
            return Err(CodeError::ShapeMismatch(alloc::format!(
                "hx has {} columns, hz has {}",
                hx.cols(),
                hz.cols()
            )));
        }
        if !hx.mul_is_zero(&hz.transpose()) {
            return Err(CodeError::CssOrthogonality);
        }
        for (meta, checks) in [(&meta_x, &hx), (&meta_z, &hz)] {
            if let Some(m) = meta {
                if m.cols() != checks.rows() {
                    return Err(CodeError::ShapeMismatch(alloc::format!(
                        "metacheck has {} columns for {} checks",
                        m.cols(),
                        checks.rows()
                    )));
                }
                if !m.mul_is_zero(checks) {
                    return Err(CodeError::MetaOrthogonality);
                }
            }
        }

        let k = hx.cols() - hx.rank() - hz.rank();
        let lx_rows = quotient_basis(&hz, &hx, k);
        let lz_rows = quotient_basis(&hx, &hz, k);
        if lx_rows.len() != k || lz_rows.len() != k {
            return Err(CodeError::DegeneratePairing);
        }
        let lx = rows_to_matrix(&lx_rows, hx.cols());
        let lz = normalize_pairing(&lx, rows_to_matrix(&lz_rows, hx.cols()))?;

        Ok(Self { hx, hz, meta_x, meta_z, lx, lz })
    }

    /// Number of physical qubits.
    #[must_use]
    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    /// Number of logical qubits.
    #[must_use]
    pub fn k(&self) -> usize {
        self.lx.rows()
    }

    /// Exchanges the roles of X and Z.
    #[must_use]
    pub fn swap_xz(self) -> Self {
        Self {
            hx: self.hz,
            hz: self.hx,
            meta_x: self.meta_z,
            meta_z: self.meta_x,
            lx: self.lz,
            lz: self.lx,
        }
    }

    /// Logical X operators flipped by a residual Z error.
    ///
    /// The residual must commute with the stabilizers (zero X syndrome);
    /// the result is then its pairing against the logical X basis, one bit
    /// per logical qubit. A nonzero result is a logical Z error.
    #[must_use]
    pub fn logical_flips_from_z(&self, residual_z: &BitVec) -> BitVec {
        self.lx.matvec(residual_z)
    }

    /// Logical Z operators flipped by a residual X error.
    #[must_use]
    pub fn logical_flips_from_x(&self, residual_x: &BitVec) -> BitVec {
        self.lz.matvec(residual_x)
    }
}

/// Picks `k` kernel vectors of `checks` that are independent modulo the row
/// space of `stabilizers`.
fn quotient_basis(
    checks: &SparseBitMatrix,
    stabilizers: &SparseBitMatrix,
    k: usize,
) -> Vec<BitVec> {
    let mut echelon = Echelon::new(stabilizers.cols());
    for row in stabilizers.to_dense_rows() {
        echelon.insert(&row);
    }
    let mut basis = Vec::with_capacity(k);
    for v in checks.kernel_basis() {
        if basis.len() == k {
            break;
        }
        if echelon.insert(&v) {
            basis.push(v);
        }
    }
    basis
}

fn rows_to_matrix(rows: &[BitVec], cols: usize) -> SparseBitMatrix {
    let supports = rows
        .iter()
        .map(|v| v.ones().map(|c| c as u32).collect())
        .collect();
    SparseBitMatrix::from_rows(supports, cols).expect("row vectors match declared width")
}

/// Replaces `lz` by `A * lz` so that `lx * lzᵀ = I`.
fn normalize_pairing(
    lx: &SparseBitMatrix,
    lz: SparseBitMatrix,
) -> Result<SparseBitMatrix, CodeError> {
    let k = lx.rows();
    if k == 0 {
        return Ok(lz);
    }
    let pairing = lx.mul(&lz.transpose());
    let reduction = pairing.row_reduce();
    if reduction.reduced != SparseBitMatrix::identity(k) {
        return Err(CodeError::DegeneratePairing);
    }
    // reduction.row_transform is pairing⁻¹; lz ← (pairing⁻¹)ᵀ lz gives
    // lx * lzᵀ = pairing * pairing⁻¹ = I.
    let normalized = reduction.row_transform.transpose().mul(&lz);
    debug_assert_eq!(lx.mul(&normalized.transpose()), SparseBitMatrix::identity(k));
    Ok(normalized)
}

/// Builds the 3D surface code (open boundaries) or 3D toric code (periodic)
/// of linear size `len`.
///
/// Both arise from a three-fold tensor product of 1D complexes. Qubits sit
/// at level 1; the level-0 boundary gives the Z checks, the level-2 boundary
/// transposed gives the X checks, and the level-3 boundary transposed gives
/// metachecks on the X syndrome. The toric code has parameters
/// `[[3L³, 3]]`, the open-boundary surface code `[[2L(L-1)² + L³, 1]]`.
///
/// # Panics
/// Panics if `len < 2`.
#[must_use]
pub fn surface_code_3d(len: usize, periodic: bool) -> CssCode {
    assert!(len >= 2, "3D surface code needs len >= 2");
    let complex = if periodic {
        let ring = ring_chain(len);
        ring.tensor(&ring).tensor(&ring)
    } else {
        let interval = interval_chain(len);
        interval.tensor(&interval).tensor(&dual_interval_chain(len))
    };
    complex_to_css(&complex)
}

/// Extracts the CSS code spanning levels 0..=3 of a chain complex.
fn complex_to_css(complex: &ChainComplex) -> CssCode {
    let hz = complex.boundary(1).clone();
    let hx = complex.boundary(2).transpose();
    let meta_x = (complex.length() >= 3).then(|| complex.boundary(3).transpose());
    CssCode::new(hx, hz, meta_x, None).expect("chain complex yields a valid CSS code")
}

// ---------------------------------------------------------------------------
// Lifted product codes
// ---------------------------------------------------------------------------

/// A matrix of monomials over the cyclic group algebra F₂[x]/(xˡ - 1).
///
/// Every present entry is a single power `x^a`; sums of powers never arise in
/// the lifted-product assembly because Kronecker products and conjugate
/// transposes of monomials are monomials.
#[derive(Clone)]
struct MonomialMatrix {
    exps: Vec<Vec<Option<u32>>>,
    lift: u32,
}

impl MonomialMatrix {
    fn from_exponents(rows: &[Vec<u32>], lift: u32) -> Self {
        let exps = rows
            .iter()
            .map(|r| r.iter().map(|&a| Some(a % lift)).collect())
            .collect();
        Self { exps, lift }
    }

    fn identity(n: usize, lift: u32) -> Self {
        let exps = (0..n)
            .map(|i| (0..n).map(|j| (i == j).then_some(0)).collect())
            .collect();
        Self { exps, lift }
    }

    fn rows(&self) -> usize {
        self.exps.len()
    }

    fn cols(&self) -> usize {
        self.exps.first().map_or(0, Vec::len)
    }

    fn kron(&self, other: &Self) -> Self {
        assert_eq!(self.lift, other.lift);
        let mut exps = Vec::with_capacity(self.rows() * other.rows());
        for a_row in &self.exps {
            for b_row in &other.exps {
                let mut row = Vec::with_capacity(self.cols() * other.cols());
                for &a in a_row {
                    for &b in b_row {
                        row.push(match (a, b) {
                            (Some(a), Some(b)) => Some((a + b) % self.lift),
                            _ => None,
                        });
                    }
                }
                exps.push(row);
            }
        }
        Self { exps, lift: self.lift }
    }

    /// Conjugate transpose: `x^a` maps to `x^(l - a)`.
    fn conj_transpose(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let exps = (0..c)
            .map(|j| {
                (0..r)
                    .map(|i| self.exps[i][j].map(|a| (self.lift - a) % self.lift))
                    .collect()
            })
            .collect();
        Self { exps, lift: self.lift }
    }

    fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows(), other.rows());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Self { exps, lift: self.lift }
    }

    fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols(), other.cols());
        let mut exps = self.exps.clone();
        exps.extend(other.exps.iter().cloned());
        Self { exps, lift: self.lift }
    }

    /// Expands each monomial to an `l x l` circulant block.
    fn lift_binary(&self) -> SparseBitMatrix {
        let l = self.lift as usize;
        let mut rows = vec![Vec::new(); self.rows() * l];
        for (i, row) in self.exps.iter().enumerate() {
            for (j, &entry) in row.iter().enumerate() {
                if let Some(a) = entry {
                    for r in 0..l {
                        rows[i * l + r].push((j * l + (r + a as usize) % l) as u32);
                    }
                }
            }
        }
        SparseBitMatrix::from_rows(rows, self.cols() * l)
            .expect("lifted circulant indices are in range")
    }
}

/// Builds a lifted-product code from a base matrix of circulant exponents.
///
/// The base matrix `B` has monomial entries `x^(b_ij)` over
/// F₂[x]/(xˡ - 1). With `B` of shape `r x c` the checks are
///
/// ```text
/// hz = [B ⊗ I_c | I_r ⊗ B*]           (rc·l  rows)
/// hx = ([I_c ⊗ B* ; B ⊗ I_r])ᵀ        (rc·l  rows)
/// ```
///
/// where `B*` is the conjugate transpose and the outer transpose acts on the
/// lifted binary matrix. The block length is `(c² + r²)·l`.
pub fn lifted_product_code(base: &[Vec<u32>], lift: u32) -> Result<CssCode, CodeError> {
    if lift == 0 {
        return Err(CodeError::BadParameter("lift must be positive".into()));
    }
    let r = base.len();
    let c = base.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(CodeError::BadParameter("base matrix must be nonempty".into()));
    }
    if base.iter().any(|row| row.len() != c) {
        return Err(CodeError::BadParameter("base matrix must be rectangular".into()));
    }

    let b = MonomialMatrix::from_exponents(base, lift);
    let b_star = b.conj_transpose();
    let i_r = MonomialMatrix::identity(r, lift);
    let i_c = MonomialMatrix::identity(c, lift);

    let hz = b.kron(&i_c).hstack(&i_r.kron(&b_star)).lift_binary();
    let hx = i_c
        .kron(&b_star)
        .vstack(&b.kron(&i_r))
        .lift_binary()
        .transpose();

    CssCode::new(hx, hz, None, None)
}

/// Preset lifted-product code families used throughout the simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpPreset {
    /// `[[544, 80]]`, lift 16.
    N544K80,
    /// `[[714, 100]]`, lift 21.
    N714K100,
    /// `[[1020, 136]]`, lift 30.
    N1020K136,
}

impl LpPreset {
    /// The base matrix of circulant exponents and the lift size.
    #[must_use]
    pub fn base(self) -> (Vec<Vec<u32>>, u32) {
        match self {
            LpPreset::N544K80 => (
                vec![
                    vec![0, 0, 0, 0, 0],
                    vec![0, 2, 4, 7, 11],
                    vec![0, 3, 10, 14, 15],
                ],
                16,
            ),
            LpPreset::N714K100 => (
                vec![
                    vec![0, 0, 0, 0, 0],
                    vec![0, 4, 5, 7, 17],
                    vec![0, 14, 18, 12, 11],
                ],
                21,
            ),
            LpPreset::N1020K136 => (
                vec![
                    vec![0, 0, 0, 0, 0],
                    vec![0, 2, 14, 24, 25],
                    vec![0, 16, 11, 14, 13],
                ],
                30,
            ),
        }
    }

    /// Builds the preset code.
    #[must_use]
    pub fn build(self) -> CssCode {
        let (base, lift) = self.base();
        lifted_product_code(&base, lift).expect("preset lifted-product parameters are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toric_3d_parameters() {
        for len in [2usize, 3] {
            let code = surface_code_3d(len, true);
            assert_eq!(code.n(), 3 * len.pow(3), "len={len}");
            assert_eq!(code.k(), 3, "len={len}");
        }
    }

    #[test]
    fn toric_3d_check_weights() {
        let code = surface_code_3d(3, true);
        // Vertex (Z) checks touch 6 edges, face (X) checks touch 4 edges,
        // cube metachecks touch 6 faces.
        for r in 0..code.hz.rows() {
            assert_eq!(code.hz.row(r).len(), 6);
        }
        for r in 0..code.hx.rows() {
            assert_eq!(code.hx.row(r).len(), 4);
        }
        let meta = code.meta_x.as_ref().unwrap();
        assert_eq!(meta.rows(), 27);
        for r in 0..meta.rows() {
            assert_eq!(meta.row(r).len(), 6);
        }
    }

    #[test]
    fn surface_3d_open_parameters() {
        let code = surface_code_3d(3, false);
        assert_eq!(code.n(), 51);
        assert_eq!(code.k(), 1);
        assert!(code.meta_x.is_some());
    }

    #[test]
    fn logical_pairing_is_identity() {
        let code = surface_code_3d(3, true);
        let pairing = code.lx.mul(&code.lz.transpose());
        assert_eq!(pairing, SparseBitMatrix::identity(3));
        // Logicals commute with the opposite stabilizer group.
        assert!(code.hz.mul_is_zero(&code.lx.transpose()));
        assert!(code.hx.mul_is_zero(&code.lz.transpose()));
    }

    #[test]
    fn logical_flip_detection() {
        let code = surface_code_3d(2, false);
        // A logical Z operator itself is a closed residual that flips X.
        let lz0 = code.lz.to_dense_rows().pop().unwrap();
        assert!(code.hx.matvec(&lz0).is_zero());
        let flips = code.logical_flips_from_z(&lz0);
        assert_eq!(flips.ones().collect::<Vec<_>>(), vec![0]);
        // An X-stabilizer row is a trivial X residual.
        let stab = code.hx.to_dense_rows().pop().unwrap();
        assert!(code.logical_flips_from_x(&stab).is_zero());
    }

    #[test]
    fn swap_xz_swaps_roles() {
        let code = surface_code_3d(2, true);
        let swapped = code.clone().swap_xz();
        assert_eq!(swapped.hx, code.hz);
        assert_eq!(swapped.hz, code.hx);
        assert!(swapped.meta_z.is_some());
        assert!(swapped.meta_x.is_none());
        assert_eq!(swapped.lx, code.lz);
    }

    #[test]
    fn lifted_product_presets() {
        for (preset, n, k) in [
            (LpPreset::N544K80, 544, 80),
            (LpPreset::N714K100, 714, 100),
        ] {
            let code = preset.build();
            assert_eq!(code.n(), n, "{preset:?}");
            assert_eq!(code.k(), k, "{preset:?}");
            assert!(code.meta_x.is_none());
        }
    }

    #[test]
    fn lifted_product_largest_preset() {
        let code = LpPreset::N1020K136.build();
        assert_eq!(code.n(), 1020);
        assert_eq!(code.k(), 136);
    }

    #[test]
    fn lifted_product_check_degrees() {
        // Base is 3x5 with all entries present: hz rows touch 5 data blocks
        // on the left and 3 on the right via B*, so every check has weight 8.
        let code = LpPreset::N544K80.build();
        assert_eq!(code.hz.rows(), 240);
        assert_eq!(code.hx.rows(), 240);
        for r in 0..code.hz.rows() {
            assert_eq!(code.hz.row(r).len(), 8);
        }
        for r in 0..code.hx.rows() {
            assert_eq!(code.hx.row(r).len(), 8);
        }
    }

    #[test]
    fn lifted_product_rejects_bad_parameters() {
        assert!(matches!(
            lifted_product_code(&[vec![0, 1], vec![2]], 4),
            Err(CodeError::BadParameter(_))
        ));
        assert!(matches!(
            lifted_product_code(&[vec![0, 1]], 0),
            Err(CodeError::BadParameter(_))
        ));
    }

    #[test]
    fn css_new_rejects_non_orthogonal() {
        let h = SparseBitMatrix::identity(3);
        assert!(matches!(
            CssCode::new(h.clone(), h, None, None),
            Err(CodeError::CssOrthogonality)
        ));
    }
}
