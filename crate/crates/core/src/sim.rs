//! Monte Carlo scenario runners and failure-rate estimation.
//!
//! Each scenario owns its prebuilt decoding structures and exposes a pure
//! `sample(master_seed, index)` method, so samples are reproducible in any
//! order and safe to distribute across threads. Noise draws use separate
//! [`StreamTag`] streams for data errors and the two syndrome sectors, which
//! keeps realizations identical when only the decoder configuration changes.

use alloc::vec;
use alloc::vec::Vec;

use crate::analog::{
    atd_decode, build_atg, build_single_stage, overlapping_window_decode, AugmentedMatrix,
    QssDecoder, VirtualPrior,
};
use crate::codes::CssCode;
use crate::decoder::{decode_soft, DecoderConfig, TannerGraph};
use crate::float;
use crate::gf2::BitVec;
use crate::noise::{
    prob_to_llr, sample_analog_syndrome, AnalogSyndrome, PauliChannel, PRIOR_CLAMP,
};
use crate::rng::{SampleRng, StreamTag};

fn data_prior_llr(p: f64) -> f64 {
    prob_to_llr(p.max(PRIOR_CLAMP))
}

// ---------------------------------------------------------------------------
// Code-capacity runs
// ---------------------------------------------------------------------------

/// Decoder family used for code-capacity samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityAlgorithm {
    /// Joint decoding over the augmented graph `[H | I]`.
    AnalogTanner,
    /// Soft-syndrome message passing on the plain graph.
    SoftSyndrome,
}

/// Per-sample outcome of a capacity run, one flag per error sector.
#[derive(Debug, Clone, Copy)]
pub struct CapacityOutcome {
    /// The X-error correction failed (Z-check side).
    pub x_error_failed: bool,
    /// The Z-error correction failed (X-check side).
    pub z_error_failed: bool,
}

/// Code-capacity scenario: one data error, one noisy readout, one decode per
/// sector.
#[derive(Debug)]
pub struct CapacityScenario<'a> {
    code: &'a CssCode,
    channel: PauliChannel,
    sigma: f64,
    algorithm: CapacityAlgorithm,
    config: DecoderConfig,
    x_error_prior: f64,
    z_error_prior: f64,
    atg_x: Option<AugmentedMatrix>,
    atg_z: Option<AugmentedMatrix>,
    graph_x: Option<TannerGraph>,
    graph_z: Option<TannerGraph>,
}

impl<'a> CapacityScenario<'a> {
    /// Prepares the decoding structures for `code` under `channel` with
    /// readout width `sigma`.
    #[must_use]
    pub fn new(
        code: &'a CssCode,
        channel: PauliChannel,
        sigma: f64,
        algorithm: CapacityAlgorithm,
        config: DecoderConfig,
    ) -> Self {
        let (atg_x, atg_z, graph_x, graph_z) = match algorithm {
            CapacityAlgorithm::AnalogTanner => (
                Some(build_atg(&code.hx)),
                Some(build_atg(&code.hz)),
                None,
                None,
            ),
            CapacityAlgorithm::SoftSyndrome => (
                None,
                None,
                Some(TannerGraph::new(&code.hx)),
                Some(TannerGraph::new(&code.hz)),
            ),
        };
        Self {
            code,
            channel,
            sigma,
            algorithm,
            config,
            x_error_prior: data_prior_llr(channel.marginal_x()),
            z_error_prior: data_prior_llr(channel.marginal_z()),
            atg_x,
            atg_z,
            graph_x,
            graph_z,
        }
    }

    fn decode_sector(
        &self,
        aug: &Option<AugmentedMatrix>,
        graph: &Option<TannerGraph>,
        prior: f64,
        analog: &AnalogSyndrome,
    ) -> (BitVec, bool) {
        match self.algorithm {
            CapacityAlgorithm::AnalogTanner => {
                let outcome = atd_decode(
                    aug.as_ref().expect("augmented matrix prebuilt"),
                    prior,
                    analog,
                    &self.config,
                );
                (outcome.data_estimate, outcome.decode.satisfied)
            }
            CapacityAlgorithm::SoftSyndrome => {
                let graph = graph.as_ref().expect("graph prebuilt");
                let priors = vec![prior; graph.n_bits()];
                let outcome = decode_soft(graph, &priors, &analog.llrs(), &self.config);
                (outcome.estimate, outcome.satisfied)
            }
        }
    }

    /// Runs sample `index` of the stream seeded by `master_seed`.
    #[must_use]
    pub fn sample(&self, master_seed: u64, index: u64) -> CapacityOutcome {
        let mut err_rng = SampleRng::new(master_seed, index, StreamTag::Error);
        let (e_x, e_z) = self.channel.sample(self.code.n(), &mut err_rng);

        let mut sx_rng = SampleRng::new(master_seed, index, StreamTag::SyndromeX);
        let analog_x =
            sample_analog_syndrome(&self.code.hx.matvec(&e_z), self.sigma, &mut sx_rng);
        let (mut estimate_z, satisfied_x) =
            self.decode_sector(&self.atg_x, &self.graph_x, self.z_error_prior, &analog_x);
        estimate_z.xor_assign(&e_z);
        let z_error_failed =
            !satisfied_x || !self.code.logical_flips_from_z(&estimate_z).is_zero();

        let mut sz_rng = SampleRng::new(master_seed, index, StreamTag::SyndromeZ);
        let analog_z =
            sample_analog_syndrome(&self.code.hz.matvec(&e_x), self.sigma, &mut sz_rng);
        let (mut estimate_x, satisfied_z) =
            self.decode_sector(&self.atg_z, &self.graph_z, self.x_error_prior, &analog_z);
        estimate_x.xor_assign(&e_x);
        let x_error_failed =
            !satisfied_z || !self.code.logical_flips_from_x(&estimate_x).is_zero();

        CapacityOutcome {
            x_error_failed,
            z_error_failed,
        }
    }
}

// ---------------------------------------------------------------------------
// Memory runs
// ---------------------------------------------------------------------------

/// Per-sample outcome of a memory run.
#[derive(Debug, Clone, Copy)]
pub struct MemoryOutcome {
    /// The final residual acts nontrivially on the code space.
    pub failed: bool,
    /// The final residual kept a nonzero syndrome: the decoder attributed
    /// part of a perfect readout to measurement error, or never converged.
    pub violation: bool,
}

/// Repeated single-shot decoding of the metacheck sector.
///
/// Each round adds fresh Z errors at `error_rate` per qubit, reads the X
/// checks with analog noise, and decodes the single-stage graph immediately.
/// A closing noiseless readout is decoded on the plain analog Tanner graph
/// before scoring, matching a code-capacity decode at zero readout noise.
#[derive(Debug)]
pub struct SingleShotScenario<'a> {
    code: &'a CssCode,
    error_rate: f64,
    sigma: f64,
    rounds: usize,
    config: DecoderConfig,
    single_stage: AugmentedMatrix,
    closing: AugmentedMatrix,
    prior: f64,
}

impl<'a> SingleShotScenario<'a> {
    /// Prepares a run of `rounds` noisy decode rounds.
    ///
    /// # Panics
    /// Panics if the code has no X metachecks.
    #[must_use]
    pub fn new(
        code: &'a CssCode,
        error_rate: f64,
        sigma: f64,
        rounds: usize,
        config: DecoderConfig,
    ) -> Self {
        let meta_x = code
            .meta_x
            .as_ref()
            .expect("single-shot decoding needs X metachecks");
        Self {
            code,
            error_rate,
            sigma,
            rounds,
            config,
            single_stage: build_single_stage(&code.hx, meta_x),
            closing: build_atg(&code.hx),
            prior: data_prior_llr(error_rate),
        }
    }

    /// Runs sample `index` of the stream seeded by `master_seed`.
    #[must_use]
    pub fn sample(&self, master_seed: u64, index: u64) -> MemoryOutcome {
        let channel = PauliChannel::phase_flip(self.error_rate);
        let mut err_rng = SampleRng::new(master_seed, index, StreamTag::Error);
        let mut syn_rng = SampleRng::new(master_seed, index, StreamTag::SyndromeX);
        let n = self.code.n();
        let mut error = BitVec::zeros(n);
        let mut correction = BitVec::zeros(n);
        for _ in 0..self.rounds {
            let (_, fresh_z) = channel.sample(n, &mut err_rng);
            error.xor_assign(&fresh_z);
            let mut residual = error.clone();
            residual.xor_assign(&correction);
            let syndrome = self.code.hx.matvec(&residual);
            let analog = sample_analog_syndrome(&syndrome, self.sigma, &mut syn_rng);
            let outcome = atd_decode(&self.single_stage, self.prior, &analog, &self.config);
            correction.xor_assign(&outcome.data_estimate);
        }
        let mut residual = error.clone();
        residual.xor_assign(&correction);
        let closing = AnalogSyndrome::noiseless(&self.code.hx.matvec(&residual));
        let outcome = atd_decode(&self.closing, self.prior, &closing, &self.config);
        residual.xor_assign(&outcome.data_estimate);

        let violation = !self.code.hx.matvec(&residual).is_zero();
        let failed = violation || !self.code.logical_flips_from_z(&residual).is_zero();
        MemoryOutcome { failed, violation }
    }
}

/// Overlapping-window decoding of the sector without metachecks.
///
/// Each noisy round adds fresh X errors at `error_rate` per qubit and reads
/// the Z checks cumulatively with analog noise; the final round is a perfect
/// readout with no fresh error. `total_rounds` counts the perfect round.
#[derive(Debug)]
pub struct WindowScenario<'a> {
    code: &'a CssCode,
    error_rate: f64,
    sigma: f64,
    total_rounds: usize,
    window: usize,
    virtual_prior: VirtualPrior,
    config: DecoderConfig,
    prior: f64,
}

impl<'a> WindowScenario<'a> {
    /// Prepares a run of `total_rounds` readouts decoded with commit width
    /// `window`.
    ///
    /// # Panics
    /// Panics if `total_rounds < 2` or `window` is zero.
    #[must_use]
    pub fn new(
        code: &'a CssCode,
        error_rate: f64,
        sigma: f64,
        total_rounds: usize,
        window: usize,
        virtual_prior: VirtualPrior,
        config: DecoderConfig,
    ) -> Self {
        assert!(total_rounds >= 2, "need a noisy and a perfect round");
        assert!(window > 0, "window must be positive");
        Self {
            code,
            error_rate,
            sigma,
            total_rounds,
            window,
            virtual_prior,
            config,
            prior: data_prior_llr(error_rate),
        }
    }

    /// Runs sample `index` of the stream seeded by `master_seed`.
    #[must_use]
    pub fn sample(&self, master_seed: u64, index: u64) -> MemoryOutcome {
        let channel = PauliChannel::bit_flip(self.error_rate);
        let mut err_rng = SampleRng::new(master_seed, index, StreamTag::Error);
        let mut syn_rng = SampleRng::new(master_seed, index, StreamTag::SyndromeZ);
        let n = self.code.n();
        let mut error = BitVec::zeros(n);
        let mut rounds = Vec::with_capacity(self.total_rounds);
        for _ in 0..self.total_rounds - 1 {
            let (fresh_x, _) = channel.sample(n, &mut err_rng);
            error.xor_assign(&fresh_x);
            let syndrome = self.code.hz.matvec(&error);
            rounds.push(sample_analog_syndrome(&syndrome, self.sigma, &mut syn_rng));
        }
        rounds.push(AnalogSyndrome::noiseless(&self.code.hz.matvec(&error)));
        let report = overlapping_window_decode(
            &self.code.hz,
            &rounds,
            self.window,
            self.prior,
            self.virtual_prior,
            true,
            &self.config,
        );
        let mut residual = error;
        residual.xor_assign(&report.correction);
        let violation = !self.code.hz.matvec(&residual).is_zero();
        let failed = violation || !self.code.logical_flips_from_x(&residual).is_zero();
        MemoryOutcome { failed, violation }
    }
}

/// Per-sample outcome of a quasi-single-shot run.
#[derive(Debug, Clone, Copy)]
pub struct QssOutcome {
    /// The X-error correction failed (windowed sector).
    pub x_error_failed: bool,
    /// The Z-error correction failed (single-shot sector).
    pub z_error_failed: bool,
    /// Residuals that were not stabilizer syndrome matches.
    pub violations: usize,
}

impl QssOutcome {
    /// Whether either sector failed.
    #[must_use]
    pub fn failed(&self) -> bool {
        self.x_error_failed || self.z_error_failed
    }
}

/// Quasi-single-shot memory run over both sectors.
///
/// Runs `noisy_rounds` rounds of fresh channel noise with analog readouts of
/// both check sectors, closed by one perfect readout. The total noise
/// exposure is fixed by `noisy_rounds` alone, so runs with different window
/// widths decode the same memory experiment and differ only in how the
/// buffered sector slides.
#[derive(Debug)]
pub struct QssScenario<'a> {
    code: &'a CssCode,
    channel: PauliChannel,
    sigma: f64,
    window: usize,
    noisy_rounds: usize,
    config: DecoderConfig,
    x_error_prior: f64,
    z_error_prior: f64,
}

impl<'a> QssScenario<'a> {
    /// Prepares a quasi-single-shot run.
    ///
    /// # Panics
    /// Panics if the code has no X metachecks or `window` is zero.
    #[must_use]
    pub fn new(
        code: &'a CssCode,
        channel: PauliChannel,
        sigma: f64,
        window: usize,
        noisy_rounds: usize,
        config: DecoderConfig,
    ) -> Self {
        assert!(code.meta_x.is_some(), "quasi-single-shot needs X metachecks");
        assert!(window > 0, "window must be positive");
        Self {
            code,
            channel,
            sigma,
            window,
            noisy_rounds,
            config,
            x_error_prior: data_prior_llr(channel.marginal_x()),
            z_error_prior: data_prior_llr(channel.marginal_z()),
        }
    }

    /// Runs sample `index` of the stream seeded by `master_seed`.
    #[must_use]
    pub fn sample(&self, master_seed: u64, index: u64) -> QssOutcome {
        let mut err_rng = SampleRng::new(master_seed, index, StreamTag::Error);
        let mut sx_rng = SampleRng::new(master_seed, index, StreamTag::SyndromeX);
        let mut sz_rng = SampleRng::new(master_seed, index, StreamTag::SyndromeZ);
        let n = self.code.n();
        let mut decoder = QssDecoder::new(
            self.code,
            self.window,
            self.x_error_prior,
            self.z_error_prior,
            self.config,
        );
        let mut error_x = BitVec::zeros(n);
        let mut error_z = BitVec::zeros(n);
        for _ in 0..self.noisy_rounds {
            let (fresh_x, fresh_z) = self.channel.sample(n, &mut err_rng);
            error_x.xor_assign(&fresh_x);
            error_z.xor_assign(&fresh_z);
            let analog_x = sample_analog_syndrome(
                &self.code.hx.matvec(&error_z),
                self.sigma,
                &mut sx_rng,
            );
            let analog_z = sample_analog_syndrome(
                &self.code.hz.matvec(&error_x),
                self.sigma,
                &mut sz_rng,
            );
            decoder.push_round(&analog_x, analog_z);
        }
        let perfect_x = AnalogSyndrome::noiseless(&self.code.hx.matvec(&error_z));
        let perfect_z = AnalogSyndrome::noiseless(&self.code.hz.matvec(&error_x));
        decoder.push_round(&perfect_x, perfect_z);
        let report = decoder.finish();

        let mut residual_x = error_x;
        residual_x.xor_assign(&report.x_correction);
        let mut residual_z = error_z;
        residual_z.xor_assign(&report.z_correction);
        let x_violation = !self.code.hz.matvec(&residual_x).is_zero();
        let z_violation = !self.code.hx.matvec(&residual_z).is_zero();
        let violations = usize::from(x_violation) + usize::from(z_violation);
        let x_error_failed =
            x_violation || !self.code.logical_flips_from_x(&residual_x).is_zero();
        let z_error_failed =
            z_violation || !self.code.logical_flips_from_z(&residual_z).is_zero();
        QssOutcome {
            x_error_failed,
            z_error_failed,
            violations,
        }
    }
}

// ---------------------------------------------------------------------------
// Rate estimation
// ---------------------------------------------------------------------------

/// A binomial failure-rate estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateEstimate {
    /// Observed failures.
    pub failures: u64,
    /// Total samples.
    pub samples: u64,
}

impl RateEstimate {
    /// Point estimate of the failure probability.
    ///
    /// # Panics
    /// Panics if no samples were taken.
    #[must_use]
    pub fn rate(&self) -> f64 {
        assert!(self.samples > 0, "rate of an empty estimate");
        self.failures as f64 / self.samples as f64
    }

    /// One-sigma binomial error bar `sqrt(p (1 - p) / N)`.
    #[must_use]
    pub fn std_err(&self) -> f64 {
        let p = self.rate();
        float::sqrt(p * (1.0 - p) / self.samples as f64)
    }

    /// Relative error `std_err / rate`, infinite when nothing failed.
    #[must_use]
    pub fn relative_err(&self) -> f64 {
        let p = self.rate();
        if p == 0.0 {
            f64::INFINITY
        } else {
            self.std_err() / p
        }
    }

    /// Per-logical-qubit word error rate `1 - (1 - p)^(1/k)`.
    ///
    /// # Panics
    /// Panics if `k` is zero.
    #[must_use]
    pub fn word_error_rate(&self, k: usize) -> f64 {
        word_error_rate(self.rate(), k)
    }

    /// Error bar of [`Self::word_error_rate`] by linear propagation.
    ///
    /// # Panics
    /// Panics if `k` is zero.
    #[must_use]
    pub fn word_error_bar(&self, k: usize) -> f64 {
        assert!(k > 0, "k must be positive");
        let p = self.rate();
        let slope = float::exp((1.0 / k as f64 - 1.0) * float::ln_1p(-p)) / k as f64;
        self.std_err() * slope
    }

    /// Merges two disjoint estimates.
    #[must_use]
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            failures: self.failures + other.failures,
            samples: self.samples + other.samples,
        }
    }
}

/// Per-logical-qubit word error rate `1 - (1 - p)^(1/k)`.
///
/// # Panics
/// Panics if `k` is zero.
#[must_use]
pub fn word_error_rate(p: f64, k: usize) -> f64 {
    assert!(k > 0, "k must be positive");
    -float::exp_m1(float::ln_1p(-p) / k as f64)
}

/// Combines independent failure rates of the two sectors.
///
/// Returns the probability that at least one sector fails together with its
/// propagated error bar.
#[must_use]
pub fn combine_rates(p_x: f64, err_x: f64, p_z: f64, err_z: f64) -> (f64, f64) {
    let p = p_x + p_z - p_x * p_z;
    let err = float::sqrt(
        err_x * err_x * (1.0 - err_z) * (1.0 - err_z)
            + err_z * err_z * (1.0 - err_x) * (1.0 - err_x),
    );
    (p, err)
}

/// Stopping rule for adaptive failure-rate estimation.
#[derive(Debug, Clone, Copy)]
pub struct SamplingPlan {
    /// Hard cap on the number of samples.
    pub max_samples: u64,
    /// Samples per batch; stopping is only evaluated on batch boundaries so
    /// parallel runners reproduce sequential results.
    pub batch: u64,
    /// Stop once `std_err / rate` drops below this value.
    pub target_relative_err: f64,
}

/// Estimates a failure rate by drawing samples `0, 1, 2, ...` until the plan
/// says to stop.
///
/// # Panics
/// Panics if the plan has a zero batch or zero sample cap.
#[must_use]
pub fn estimate_rate<F: Fn(u64) -> bool>(plan: &SamplingPlan, sample: F) -> RateEstimate {
    assert!(plan.batch > 0, "batch must be positive");
    assert!(plan.max_samples > 0, "sample cap must be positive");
    let mut estimate = RateEstimate {
        failures: 0,
        samples: 0,
    };
    while estimate.samples < plan.max_samples {
        let end = (estimate.samples + plan.batch).min(plan.max_samples);
        for index in estimate.samples..end {
            if sample(index) {
                estimate.failures += 1;
            }
        }
        estimate.samples = end;
        if estimate.failures > 0 && estimate.relative_err() < plan.target_relative_err {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::surface_code_3d;
    use crate::decoder::OsdMethod;

    fn osd_config() -> DecoderConfig {
        DecoderConfig {
            osd: Some(OsdMethod::CombinationSweep),
            ..DecoderConfig::default()
        }
    }

    #[test]
    fn rate_estimate_closed_forms() {
        let est = RateEstimate {
            failures: 25,
            samples: 400,
        };
        assert!((est.rate() - 0.0625).abs() < 1e-15);
        let err = (0.0625f64 * 0.9375 / 400.0).sqrt();
        assert!((est.std_err() - err).abs() < 1e-15);
        assert!((est.relative_err() - err / 0.0625).abs() < 1e-12);
        let wer = 1.0 - 0.9375f64.powf(1.0 / 3.0);
        assert!((est.word_error_rate(3) - wer).abs() < 1e-12);
    }

    #[test]
    fn word_error_bar_matches_finite_difference() {
        let est = RateEstimate {
            failures: 50,
            samples: 1000,
        };
        let k = 4;
        let p = est.rate();
        let h = 1e-7;
        let slope = (word_error_rate(p + h, k) - word_error_rate(p - h, k)) / (2.0 * h);
        let expected = est.std_err() * slope;
        assert!((est.word_error_bar(k) - expected).abs() < 1e-9);
    }

    #[test]
    fn combine_rates_frozen_example() {
        let (p, err) = combine_rates(0.1, 0.01, 0.2, 0.02);
        assert!((p - 0.28).abs() < 1e-15);
        let expected = (0.01f64 * 0.01 * 0.98 * 0.98 + 0.02 * 0.02 * 0.99 * 0.99).sqrt();
        assert!((err - expected).abs() < 1e-15);
    }

    #[test]
    fn estimate_rate_respects_cap_and_cutoff() {
        let coin = |i: u64| i % 2 == 0;
        let exhaustive = estimate_rate(
            &SamplingPlan {
                max_samples: 175,
                batch: 50,
                target_relative_err: 0.0,
            },
            coin,
        );
        assert_eq!(exhaustive.samples, 175);
        assert_eq!(exhaustive.failures, 88);

        let early = estimate_rate(
            &SamplingPlan {
                max_samples: 10_000,
                batch: 50,
                target_relative_err: 0.5,
            },
            coin,
        );
        assert_eq!(early.samples, 50);
    }

    #[test]
    fn capacity_samples_are_deterministic() {
        let code = surface_code_3d(2, true);
        let scenario = CapacityScenario::new(
            &code,
            PauliChannel::depolarizing(0.02),
            0.2,
            CapacityAlgorithm::AnalogTanner,
            osd_config(),
        );
        let a = scenario.sample(42, 7);
        let b = scenario.sample(42, 7);
        assert_eq!(a.x_error_failed, b.x_error_failed);
        assert_eq!(a.z_error_failed, b.z_error_failed);
    }

    #[test]
    fn capacity_low_noise_mostly_succeeds() {
        let code = surface_code_3d(3, true);
        let scenario = CapacityScenario::new(
            &code,
            PauliChannel::depolarizing(0.005),
            0.1,
            CapacityAlgorithm::AnalogTanner,
            osd_config(),
        );
        let failures = (0..40)
            .filter(|&i| {
                let out = scenario.sample(3, i);
                out.x_error_failed || out.z_error_failed
            })
            .count();
        assert!(failures <= 2, "too many failures at low noise: {failures}");
    }

    #[test]
    fn soft_syndrome_capacity_runs() {
        let code = surface_code_3d(3, true);
        let scenario = CapacityScenario::new(
            &code,
            PauliChannel::depolarizing(0.01),
            0.2,
            CapacityAlgorithm::SoftSyndrome,
            osd_config(),
        );
        let failures = (0..20)
            .filter(|&i| {
                let out = scenario.sample(5, i);
                out.x_error_failed || out.z_error_failed
            })
            .count();
        assert!(failures <= 3, "too many failures at low noise: {failures}");
    }

    #[test]
    fn single_shot_noiseless_never_fails() {
        let code = surface_code_3d(2, true);
        let scenario = SingleShotScenario::new(&code, 0.0, 0.0, 3, osd_config());
        for i in 0..5 {
            let out = scenario.sample(9, i);
            assert!(!out.failed);
            assert!(!out.violation);
        }
    }

    #[test]
    fn single_shot_low_noise_mostly_succeeds() {
        let code = surface_code_3d(2, true);
        let scenario = SingleShotScenario::new(
            &code,
            0.01,
            crate::noise::sigma_from_p(0.01),
            2,
            osd_config(),
        );
        let failures = (0..20).filter(|&i| scenario.sample(13, i).failed).count();
        assert!(failures <= 3, "too many failures at low noise: {failures}");
    }

    #[test]
    fn window_memory_low_noise_mostly_succeeds() {
        let code = surface_code_3d(3, true);
        let scenario = WindowScenario::new(
            &code,
            0.005,
            crate::noise::sigma_from_p(0.005),
            4,
            2,
            VirtualPrior::Analog,
            osd_config(),
        );
        let failures = (0..15).filter(|&i| scenario.sample(17, i).failed).count();
        assert!(failures <= 2, "too many failures at low noise: {failures}");
    }

    #[test]
    fn qss_sample_is_deterministic_and_mostly_clean() {
        let code = surface_code_3d(3, true);
        let scenario = QssScenario::new(
            &code,
            PauliChannel::depolarizing(0.002),
            crate::noise::sigma_from_p(0.002),
            2,
            2,
            osd_config(),
        );
        let a = scenario.sample(21, 3);
        let b = scenario.sample(21, 3);
        assert_eq!(a.x_error_failed, b.x_error_failed);
        assert_eq!(a.z_error_failed, b.z_error_failed);
        let failures = (0..10).filter(|&i| scenario.sample(21, i).failed()).count();
        assert!(failures <= 2, "too many failures at low noise: {failures}");
    }
}
