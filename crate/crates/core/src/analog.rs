//! Analog-information decoding on augmented Tanner graphs.
//!
//! Noisy syndrome extraction is handled by appending one *virtual* bit per
//! unreliable check to the Tanner graph, so a single belief-propagation pass
//! decodes data and measurement errors jointly. Three augmentations are
//! provided:
//!
//! * [`build_atg`]: `[H | I]` for one noisy readout round,
//! * [`build_single_stage`]: `[[H, I], [0, M]]` adding metachecks `M` that
//!   constrain the virtual bits of a single-shot code,
//! * [`build_multi_round`]: the block matrix coupling several readout rounds
//!   of a code without metachecks, decoded over a sliding window by
//!   [`WindowDecoder`].
//!
//! Virtual bits receive priors from the analog readout itself: the flip
//! probability of a thresholded Gaussian readout with magnitude `|y|` is
//! `1 / (1 + exp(|2y/sigma²|))`, so confident readouts pin their virtual bit
//! and marginal ones leave it cheap to flip. [`QssDecoder`] combines a
//! single-shot side with a windowed side for codes where only one sector has
//! metachecks.

use alloc::vec;
use alloc::vec::Vec;

use crate::codes::CssCode;
use crate::decoder::{decode_hard, DecodeOutcome, DecoderConfig, TannerGraph};
use crate::gf2::{BitVec, SparseBitMatrix};
use crate::noise::{analog_llr, llr_to_prob, prob_to_llr, AnalogSyndrome, PRIOR_CLAMP};

// ---------------------------------------------------------------------------
// Augmented check matrices
// ---------------------------------------------------------------------------

/// The round-coupling matrix for `rounds` consecutive syndrome differences.
///
/// Row `t` of the difference syndrome involves the measurement error of round
/// `t` and, for `t > 0`, of round `t - 1`; the matrix is lower bidiagonal and
/// has full rank.
///
/// # Panics
/// Panics if `rounds` is zero.
#[must_use]
pub fn round_coupling_matrix(rounds: usize) -> SparseBitMatrix {
    assert!(rounds > 0, "need at least one round");
    let rows = (0..rounds)
        .map(|t| {
            if t == 0 {
                vec![0]
            } else {
                vec![t as u32 - 1, t as u32]
            }
        })
        .collect();
    SparseBitMatrix::from_rows(rows, rounds).expect("bidiagonal supports are in range")
}

/// A check matrix extended with virtual measurement-error bits, plus the
/// Tanner graph built over it.
///
/// Columns `0..n_data` are data bits; columns `n_data..` are virtual bits.
#[derive(Debug, Clone)]
pub struct AugmentedMatrix {
    matrix: SparseBitMatrix,
    n_data: usize,
    n_virtual: usize,
    meta: Option<SparseBitMatrix>,
    graph: TannerGraph,
}

impl AugmentedMatrix {
    fn new(matrix: SparseBitMatrix, n_data: usize, meta: Option<SparseBitMatrix>) -> Self {
        let n_virtual = matrix.cols() - n_data;
        let graph = TannerGraph::new(&matrix);
        Self {
            matrix,
            n_data,
            n_virtual,
            meta,
            graph,
        }
    }

    /// The full augmented check matrix.
    #[must_use]
    pub fn matrix(&self) -> &SparseBitMatrix {
        &self.matrix
    }

    /// Number of data columns.
    #[must_use]
    pub fn n_data(&self) -> usize {
        self.n_data
    }

    /// Number of virtual columns.
    #[must_use]
    pub fn n_virtual(&self) -> usize {
        self.n_virtual
    }
}

/// Builds the augmented graph `[H | I]` for one noisy readout of `h`.
///
/// Every check gains exactly one virtual bit, so the augmented matrix always
/// has full row rank and any hard syndrome is reachable.
#[must_use]
pub fn build_atg(h: &SparseBitMatrix) -> AugmentedMatrix {
    let identity = SparseBitMatrix::identity(h.rows());
    let matrix = h.hstack(&identity).expect("row counts match");
    AugmentedMatrix::new(matrix, h.cols(), None)
}

/// Builds the single-stage matrix `[[H, I], [0, M]]` for a code whose checks
/// satisfy the metachecks `M` (`M * H = 0`).
///
/// The metacheck rows constrain only the virtual bits, turning syndrome noise
/// into a decodable error on the virtual columns within the same graph.
///
/// # Panics
/// Panics if shapes are inconsistent or `M * H != 0`.
#[must_use]
pub fn build_single_stage(h: &SparseBitMatrix, meta: &SparseBitMatrix) -> AugmentedMatrix {
    assert_eq!(
        meta.cols(),
        h.rows(),
        "metacheck columns must index checks of h"
    );
    assert!(
        meta.mul_is_zero(h),
        "metachecks must annihilate the check matrix"
    );
    let identity = SparseBitMatrix::identity(h.rows());
    let matrix = SparseBitMatrix::block(&[
        vec![Some(h), Some(&identity)],
        vec![None, Some(meta)],
    ])
    .expect("block shapes are consistent");
    AugmentedMatrix::new(matrix, h.cols(), Some(meta.clone()))
}

/// Builds the multi-round matrix coupling `rounds` difference syndromes of
/// `h`.
///
/// Columns hold the fresh data error of each round followed by the
/// measurement error of each round; row block `t` checks
/// `H x_t + v_{t-1} + v_t` (without the `v_{t-1}` term at `t = 0`). The
/// result equals `[I ⊗ H | R ⊗ I]` with `R` the
/// [`round_coupling_matrix`], and each check degree grows by at most two.
///
/// # Panics
/// Panics if `rounds` is zero.
#[must_use]
pub fn build_multi_round(h: &SparseBitMatrix, rounds: usize) -> AugmentedMatrix {
    assert!(rounds > 0, "need at least one round");
    let identity = SparseBitMatrix::identity(h.rows());
    let mut grid = Vec::with_capacity(rounds);
    for t in 0..rounds {
        let mut row = vec![None; 2 * rounds];
        row[t] = Some(h);
        if t > 0 {
            row[rounds + t - 1] = Some(&identity);
        }
        row[rounds + t] = Some(&identity);
        grid.push(row);
    }
    let matrix = SparseBitMatrix::block(&grid).expect("block shapes are consistent");
    AugmentedMatrix::new(matrix, rounds * h.cols(), None)
}

// ---------------------------------------------------------------------------
// Joint decoding
// ---------------------------------------------------------------------------

/// Prior LLR of a virtual bit given the analog readout behind it.
///
/// The flip probability of the thresholded bit is `1 / (1 + exp(|llr|))`,
/// clamped below by [`PRIOR_CLAMP`]; a non-positive `sigma` means a perfect
/// readout and yields the clamped maximum confidence.
#[must_use]
pub fn virtual_prior_llr(value: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return prob_to_llr(PRIOR_CLAMP);
    }
    let magnitude = crate::float::abs(analog_llr(value, sigma));
    let flip = llr_to_prob(magnitude).max(PRIOR_CLAMP);
    prob_to_llr(flip)
}

/// How a decoder assigns priors to virtual bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VirtualPrior {
    /// Per-bit priors from the analog readout magnitudes.
    Analog,
    /// One fixed LLR for every virtual bit, discarding analog magnitudes.
    Fixed(f64),
}

impl VirtualPrior {
    fn llr(&self, value: f64, sigma: f64) -> f64 {
        match *self {
            Self::Analog => virtual_prior_llr(value, sigma),
            Self::Fixed(llr) => llr,
        }
    }
}

/// Outcome of a joint data/virtual decode.
#[derive(Debug, Clone)]
pub struct AtdOutcome {
    /// Estimated data error.
    pub data_estimate: BitVec,
    /// Estimated measurement errors on the virtual columns.
    pub virtual_estimate: BitVec,
    /// Full decoder outcome over the augmented graph.
    pub decode: DecodeOutcome,
}

/// Decodes one analog readout on an augmented graph.
///
/// The hard decode syndrome is the thresholded readout, extended by the
/// metacheck syndrome when the matrix carries metachecks; virtual priors come
/// from the readout magnitudes.
///
/// # Panics
/// Panics if the readout length differs from the number of virtual bits.
#[must_use]
pub fn atd_decode(
    aug: &AugmentedMatrix,
    data_prior_llr: f64,
    analog: &AnalogSyndrome,
    config: &DecoderConfig,
) -> AtdOutcome {
    assert_eq!(
        analog.values.len(),
        aug.n_virtual,
        "one readout per virtual bit"
    );
    let hard = analog.hard();
    let syndrome = match &aug.meta {
        None => hard,
        Some(meta) => {
            let meta_syndrome = meta.matvec(&hard);
            hard.concat(&meta_syndrome)
        }
    };
    let virtual_priors: Vec<f64> = analog
        .values
        .iter()
        .map(|&v| virtual_prior_llr(v, analog.sigma))
        .collect();
    atd_decode_with(aug, data_prior_llr, &syndrome, &virtual_priors, config)
}

/// Decodes an explicit hard syndrome with explicit virtual priors.
///
/// # Panics
/// Panics if the syndrome or prior lengths do not match the matrix.
#[must_use]
pub fn atd_decode_with(
    aug: &AugmentedMatrix,
    data_prior_llr: f64,
    syndrome: &BitVec,
    virtual_priors: &[f64],
    config: &DecoderConfig,
) -> AtdOutcome {
    assert_eq!(syndrome.len(), aug.matrix.rows(), "syndrome length");
    assert_eq!(virtual_priors.len(), aug.n_virtual, "virtual prior length");
    let mut priors = vec![data_prior_llr; aug.n_data];
    priors.extend_from_slice(virtual_priors);
    let decode = decode_hard(&aug.graph, &priors, syndrome, config);
    let data_estimate = decode.estimate.slice(0, aug.n_data);
    let virtual_estimate = decode.estimate.slice(aug.n_data, aug.n_data + aug.n_virtual);
    AtdOutcome {
        data_estimate,
        virtual_estimate,
        decode,
    }
}

// ---------------------------------------------------------------------------
// Overlapping-window decoding
// ---------------------------------------------------------------------------

/// Summary of a completed window decode pass.
#[derive(Debug, Clone)]
pub struct WindowReport {
    /// Accumulated data correction over all committed rounds.
    pub correction: BitVec,
    /// Number of window decodes performed.
    pub windows: usize,
    /// Windows whose decode failed to satisfy its own hard syndrome.
    pub unsatisfied: usize,
}

/// Streaming decoder over consecutive noisy readout rounds of one check
/// matrix.
///
/// Rounds are buffered until `2 * window` of them are ready; the decoder then
/// solves the multi-round graph over those rounds, commits the first `window`
/// rounds of its data estimate, and slides forward. [`WindowDecoder::finish`]
/// decodes whatever remains (at most `2 * window` rounds) and commits all of
/// it.
///
/// Each pushed round is the *cumulative* readout `H * E_t + f_t`; the decoder
/// forms difference syndromes internally and folds already-committed
/// corrections into the first difference of each window.
#[derive(Debug)]
pub struct WindowDecoder<'a> {
    h: &'a SparseBitMatrix,
    window: usize,
    data_prior_llr: f64,
    virtual_prior: VirtualPrior,
    final_round_perfect: bool,
    config: DecoderConfig,
    buffer: Vec<AnalogSyndrome>,
    committed: BitVec,
    cache: Vec<(usize, AugmentedMatrix)>,
    windows: usize,
    unsatisfied: usize,
}

impl<'a> WindowDecoder<'a> {
    /// Creates a window decoder over `h` with commit width `window`.
    ///
    /// When `final_round_perfect` is set, the last round passed before
    /// [`finish`](Self::finish) is treated as a noiseless readout and its
    /// virtual bits are pinned.
    ///
    /// # Panics
    /// Panics if `window` is zero.
    #[must_use]
    pub fn new(
        h: &'a SparseBitMatrix,
        window: usize,
        data_prior_llr: f64,
        virtual_prior: VirtualPrior,
        final_round_perfect: bool,
        config: DecoderConfig,
    ) -> Self {
        assert!(window > 0, "window must be positive");
        Self {
            h,
            window,
            data_prior_llr,
            virtual_prior,
            final_round_perfect,
            config,
            buffer: Vec::new(),
            committed: BitVec::zeros(h.cols()),
            cache: Vec::new(),
            windows: 0,
            unsatisfied: 0,
        }
    }

    /// Buffers one cumulative readout round, decoding a window once enough
    /// rounds are available.
    ///
    /// # Panics
    /// Panics if the readout length differs from the number of checks.
    pub fn push_round(&mut self, analog: AnalogSyndrome) {
        assert_eq!(
            analog.values.len(),
            self.h.rows(),
            "one readout per check"
        );
        self.buffer.push(analog);
        if self.buffer.len() > 2 * self.window {
            self.decode_window(2 * self.window, self.window, false);
        }
    }

    /// Decodes the remaining rounds as the final window and returns the total
    /// committed correction.
    #[must_use]
    pub fn finish(mut self) -> WindowReport {
        if !self.buffer.is_empty() {
            let len = self.buffer.len();
            self.decode_window(len, len, true);
        }
        WindowReport {
            correction: self.committed,
            windows: self.windows,
            unsatisfied: self.unsatisfied,
        }
    }

    fn matrix_index(&mut self, len: usize) -> usize {
        if let Some(i) = self.cache.iter().position(|(l, _)| *l == len) {
            return i;
        }
        self.cache.push((len, build_multi_round(self.h, len)));
        self.cache.len() - 1
    }

    fn window_inputs(&self, len: usize, is_final: bool) -> (BitVec, Vec<f64>) {
        let m = self.h.rows();
        let mut syndrome = BitVec::zeros(len * m);
        let mut virtual_priors = Vec::with_capacity(len * m);
        let mut prev_hard: Option<BitVec> = None;
        for (t, analog) in self.buffer[..len].iter().enumerate() {
            let hard = analog.hard();
            let mut diff = hard.clone();
            match &prev_hard {
                None => diff.xor_assign(&self.h.matvec(&self.committed)),
                Some(prev) => diff.xor_assign(prev),
            }
            for j in diff.ones() {
                syndrome.set(t * m + j, true);
            }
            let pinned = is_final && self.final_round_perfect && t == len - 1;
            for j in 0..m {
                virtual_priors.push(if pinned {
                    prob_to_llr(PRIOR_CLAMP)
                } else {
                    self.virtual_prior.llr(analog.values[j], analog.sigma)
                });
            }
            prev_hard = Some(hard);
        }
        (syndrome, virtual_priors)
    }

    fn decode_window(&mut self, len: usize, commit: usize, is_final: bool) {
        let idx = self.matrix_index(len);
        let (syndrome, virtual_priors) = self.window_inputs(len, is_final);
        let outcome = atd_decode_with(
            &self.cache[idx].1,
            self.data_prior_llr,
            &syndrome,
            &virtual_priors,
            &self.config,
        );
        let n = self.h.cols();
        for t in 0..commit {
            let block = outcome.data_estimate.slice(t * n, (t + 1) * n);
            self.committed.xor_assign(&block);
        }
        self.windows += 1;
        if !outcome.decode.satisfied {
            self.unsatisfied += 1;
        }
        self.buffer.drain(..commit);
    }
}

/// Decodes a full list of cumulative readout rounds in one pass.
#[must_use]
pub fn overlapping_window_decode(
    h: &SparseBitMatrix,
    rounds: &[AnalogSyndrome],
    window: usize,
    data_prior_llr: f64,
    virtual_prior: VirtualPrior,
    final_round_perfect: bool,
    config: &DecoderConfig,
) -> WindowReport {
    let mut decoder = WindowDecoder::new(
        h,
        window,
        data_prior_llr,
        virtual_prior,
        final_round_perfect,
        config.clone(),
    );
    for round in rounds {
        decoder.push_round(round.clone());
    }
    decoder.finish()
}

// ---------------------------------------------------------------------------
// Quasi-single-shot decoding
// ---------------------------------------------------------------------------

/// Report of a finished quasi-single-shot run.
#[derive(Debug, Clone)]
pub struct QssReport {
    /// Correction for the X component of the data error (from the windowed
    /// side).
    pub x_correction: BitVec,
    /// Correction for the Z component of the data error (from the
    /// single-shot side).
    pub z_correction: BitVec,
    /// Single-shot decodes that failed to satisfy their own syndrome.
    pub unsatisfied_single_shot: usize,
    /// Window decode summary for the buffered side.
    pub window: WindowReport,
}

/// Joint decoder for a CSS code with metachecks on one sector only.
///
/// The X checks (which detect Z errors and carry metachecks) are decoded
/// single-shot every round through the single-stage graph, keeping a running
/// Z correction. The Z checks (detecting X errors, no metachecks) are fed
/// to a [`WindowDecoder`]. One noiseless round must be pushed last, before
/// [`QssDecoder::finish`].
#[derive(Debug)]
pub struct QssDecoder<'a> {
    hx: &'a SparseBitMatrix,
    single_stage: AugmentedMatrix,
    z_prior_llr: f64,
    config: DecoderConfig,
    z_correction: BitVec,
    unsatisfied_single_shot: usize,
    window: WindowDecoder<'a>,
}

impl<'a> QssDecoder<'a> {
    /// Creates a decoder for `code` with Z-side commit width `window`.
    ///
    /// `x_prior_llr` and `z_prior_llr` are the data priors for X and Z error
    /// bits.
    ///
    /// # Panics
    /// Panics if the code has no X metachecks or `window` is zero.
    #[must_use]
    pub fn new(
        code: &'a CssCode,
        window: usize,
        x_prior_llr: f64,
        z_prior_llr: f64,
        config: DecoderConfig,
    ) -> Self {
        let meta_x = code
            .meta_x
            .as_ref()
            .expect("quasi-single-shot decoding needs X metachecks");
        let single_stage = build_single_stage(&code.hx, meta_x);
        let window = WindowDecoder::new(
            &code.hz,
            window,
            x_prior_llr,
            VirtualPrior::Analog,
            true,
            config.clone(),
        );
        Self {
            hx: &code.hx,
            single_stage,
            z_prior_llr,
            config,
            z_correction: BitVec::zeros(code.hx.cols()),
            unsatisfied_single_shot: 0,
            window,
        }
    }

    /// Consumes one round of readouts from both sectors.
    ///
    /// `analog_x` reads the X checks (cumulative over the true Z error);
    /// `analog_z` reads the Z checks (cumulative over the true X error). The
    /// running Z correction is folded into `analog_x` by sign flips before
    /// decoding, so callers always pass raw cumulative readouts.
    pub fn push_round(&mut self, analog_x: &AnalogSyndrome, analog_z: AnalogSyndrome) {
        let frame = self.hx.matvec(&self.z_correction);
        let values = analog_x
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| if frame.get(j) { -v } else { v })
            .collect();
        let residual = AnalogSyndrome::new(values, analog_x.sigma);
        let outcome = atd_decode(&self.single_stage, self.z_prior_llr, &residual, &self.config);
        if !outcome.decode.satisfied {
            self.unsatisfied_single_shot += 1;
        }
        self.z_correction.xor_assign(&outcome.data_estimate);
        self.window.push_round(analog_z);
    }

    /// Finishes the windowed side and returns both corrections.
    #[must_use]
    pub fn finish(self) -> QssReport {
        let window = self.window.finish();
        QssReport {
            x_correction: window.correction.clone(),
            z_correction: self.z_correction,
            unsatisfied_single_shot: self.unsatisfied_single_shot,
            window,
        }
    }
}
