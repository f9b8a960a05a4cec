//! Simulation scenarios: schema, validation, and per-point execution.
//!
//! A scenario JSON file names a code manifest, a noise sweep, a protocol,
//! and sampling limits. `simulate` expands the sweep into points, runs each
//! point to its precision target, and emits one JSON record per point.

use std::time::Instant;

use qldpc_core::analog::VirtualPrior;
use qldpc_core::codes::CssCode;
use qldpc_core::decoder::{DecoderConfig, OsdMethod};
use qldpc_core::noise::{p_from_sigma, prob_to_llr, sigma_from_p, PauliChannel, PRIOR_CLAMP};
use qldpc_core::sim::{
    combine_rates, word_error_rate, CapacityAlgorithm, CapacityScenario, QssScenario,
    SamplingPlan, SingleShotScenario, WindowScenario,
};
use serde::{Deserialize, Serialize};

use crate::manifest::Manifest;
use crate::runner::{run_samples, RunCounts, SampleVerdict};

/// Decoding protocol selected by a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Code-capacity decoding with one noisy analog readout per sector.
    Capacity,
    /// Repeated single-stage metacheck decoding on the X-check side.
    SingleShot,
    /// Quasi-single-shot: single-stage X side, windowed Z side. `rounds`
    /// noisy readouts are taken regardless of `w`, so sweeping `w` compares
    /// window widths on one memory experiment.
    Qss,
    /// Overlapping-window time-domain decoding on the Z-check side.
    Window,
}

/// Syndrome decoder used by the capacity protocol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Analog Tanner graph decoding.
    #[default]
    Atd,
    /// Soft-syndrome min-sum on the plain Tanner graph.
    Ssmsa,
}

/// Prior assigned to virtual measurement-error bits in window decoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VirtualPriorConfig {
    /// Per-readout priors from the analog magnitudes.
    Analog,
    /// Flat prior at the syndrome error rate implied by sigma, discarding
    /// per-readout magnitudes (hard-syndrome decoding).
    Channel,
    /// Flat prior at an explicit error probability.
    FixedP(f64),
}

impl Default for VirtualPriorConfig {
    fn default() -> Self {
        Self::Analog
    }
}

/// Ordered-statistics stage selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OsdSetting {
    /// Message passing only.
    #[default]
    #[serde(rename = "none")]
    None,
    /// Order-zero ordered statistics.
    #[serde(rename = "0")]
    Zero,
    /// Combination sweep over the leading free bits.
    #[serde(rename = "cs")]
    Cs,
}

fn default_max_iter() -> usize {
    DecoderConfig::default().max_iter
}

fn default_alpha() -> f64 {
    DecoderConfig::default().alpha
}

fn default_gamma() -> f64 {
    DecoderConfig::default().gamma
}

fn default_osd_order() -> usize {
    DecoderConfig::default().osd_order
}

/// Decoder knobs as they appear in scenario files.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSettings {
    /// Maximum message-passing sweeps.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Min-sum normalization factor.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Soft-syndrome trust threshold.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Ordered-statistics stage.
    #[serde(default)]
    pub osd: OsdSetting,
    /// Combination-sweep depth.
    #[serde(default = "default_osd_order")]
    pub osd_order: usize,
}

impl Default for DecoderSettings {
    fn default() -> Self {
        Self {
            max_iter: default_max_iter(),
            alpha: default_alpha(),
            gamma: default_gamma(),
            osd: OsdSetting::default(),
            osd_order: default_osd_order(),
        }
    }
}

impl DecoderSettings {
    /// Converts the file representation into the core decoder config.
    #[must_use]
    pub fn to_config(&self) -> DecoderConfig {
        DecoderConfig {
            max_iter: self.max_iter,
            alpha: self.alpha,
            gamma: self.gamma,
            osd: match self.osd {
                OsdSetting::None => None,
                OsdSetting::Zero => Some(OsdMethod::Zero),
                OsdSetting::Cs => Some(OsdMethod::CombinationSweep),
            },
            osd_order: self.osd_order,
        }
    }
}

/// Noise sweep: physical error rates and optional readout widths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Physical error rates to sweep.
    pub p: Vec<f64>,
    /// Pauli mixing ratios `[rx, ry, rz]`; depolarizing when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<[f64; 3]>,
    /// Readout widths to sweep; derived from `p` per point when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
}

impl NoiseConfig {
    fn channel(&self, p: f64) -> PauliChannel {
        match self.ratios {
            Some([rx, ry, rz]) => PauliChannel::from_ratios(p, rx, ry, rz),
            None => PauliChannel::depolarizing(p),
        }
    }
}

fn default_batch() -> u64 {
    1000
}

fn default_precision_cut() -> f64 {
    0.1
}

/// A full simulation request, parsed from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Path to the code's `manifest.json`, relative to the scenario file.
    pub code: String,
    /// Noise sweep.
    pub noise: NoiseConfig,
    /// Decoding protocol.
    pub protocol: Protocol,
    /// Capacity-protocol decoder choice.
    #[serde(default)]
    pub algorithm: Algorithm,
    /// Measurement rounds; meaning is protocol-specific.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Window half-width for the window and qss protocols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    /// Virtual-bit prior for the window protocol.
    #[serde(default)]
    pub virtual_prior: VirtualPriorConfig,
    /// Decoder knobs.
    #[serde(default)]
    pub decoder: DecoderSettings,
    /// Master seed for the per-sample RNG streams.
    pub seed: u64,
    /// Hard cap on samples per point.
    pub max_samples: u64,
    /// Samples per scheduling batch; the stopping rule is evaluated on
    /// batch boundaries only.
    #[serde(default = "default_batch")]
    pub batch: u64,
    /// Stop a point early once `err / p_l` drops below this; `0` disables
    /// early stopping.
    #[serde(default = "default_precision_cut")]
    pub precision_cut: f64,
    /// Record sink; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// One resolved sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePoint {
    /// Physical error rate.
    pub p: f64,
    /// Analog readout width.
    pub sigma: f64,
}

impl Scenario {
    /// Checks cross-field consistency; returns `field: problem` messages.
    pub fn validate(&self) -> Result<(), String> {
        if self.code.is_empty() {
            return Err("code: must name a manifest path".into());
        }
        if self.noise.p.is_empty() {
            return Err("noise.p: must list at least one error rate".into());
        }
        for (i, &p) in self.noise.p.iter().enumerate() {
            if !(0.0..1.0).contains(&p) {
                return Err(format!("noise.p[{i}]: {p} is outside [0, 1)"));
            }
        }
        if let Some(sigmas) = &self.noise.sigma {
            if sigmas.is_empty() {
                return Err("noise.sigma: must be absent or non-empty".into());
            }
            for (i, &s) in sigmas.iter().enumerate() {
                if !s.is_finite() || s < 0.0 {
                    return Err(format!("noise.sigma[{i}]: {s} is not a valid width"));
                }
            }
        }
        if let Some([rx, ry, rz]) = self.noise.ratios {
            if rx < 0.0 || ry < 0.0 || rz < 0.0 || rx + ry + rz <= 0.0 {
                return Err("noise.ratios: must be nonnegative and not all zero".into());
            }
            if matches!(self.protocol, Protocol::SingleShot | Protocol::Window) {
                return Err(
                    "noise.ratios: single_shot and window fix the Pauli type; remove ratios"
                        .into(),
                );
            }
        }
        match self.protocol {
            Protocol::Capacity => {
                if self.rounds.is_some() {
                    return Err("rounds: not used by protocol capacity".into());
                }
                if self.w.is_some() {
                    return Err("w: not used by protocol capacity".into());
                }
            }
            Protocol::SingleShot => {
                if self.rounds.is_none_or(|r| r == 0) {
                    return Err("rounds: protocol single_shot needs rounds >= 1".into());
                }
                if self.w.is_some() {
                    return Err("w: not used by protocol single_shot".into());
                }
            }
            Protocol::Window => {
                if self.rounds.is_none_or(|r| r < 2) {
                    return Err(
                        "rounds: protocol window needs rounds >= 2 (the last is noiseless)"
                            .into(),
                    );
                }
                if self.w.is_none_or(|w| w == 0) {
                    return Err("w: protocol window needs w >= 1".into());
                }
            }
            Protocol::Qss => {
                if self.rounds.is_none_or(|r| r == 0) {
                    return Err("rounds: protocol qss needs rounds >= 1".into());
                }
                if self.w.is_none_or(|w| w == 0) {
                    return Err("w: protocol qss needs w >= 1".into());
                }
            }
        }
        if self.algorithm != Algorithm::Atd && self.protocol != Protocol::Capacity {
            return Err("algorithm: only protocol capacity selects an algorithm".into());
        }
        if self.virtual_prior != VirtualPriorConfig::Analog && self.protocol != Protocol::Window
        {
            return Err("virtual_prior: only protocol window sets a virtual prior".into());
        }
        if let VirtualPriorConfig::FixedP(p) = self.virtual_prior {
            if !(0.0..=0.5).contains(&p) {
                return Err(format!("virtual_prior.fixed_p: {p} is outside [0, 0.5]"));
            }
        }
        if self.max_samples == 0 {
            return Err("max_samples: must be at least 1".into());
        }
        if self.batch == 0 {
            return Err("batch: must be at least 1".into());
        }
        if !self.precision_cut.is_finite() || self.precision_cut < 0.0 {
            return Err(format!(
                "precision_cut: {} is not a valid relative error",
                self.precision_cut
            ));
        }
        Ok(())
    }

    /// Expands the noise sweep into `(p, sigma)` points.
    #[must_use]
    pub fn points(&self) -> Vec<NoisePoint> {
        match &self.noise.sigma {
            None => self
                .noise
                .p
                .iter()
                .map(|&p| NoisePoint { p, sigma: sigma_from_p(p.max(PRIOR_CLAMP)) })
                .collect(),
            Some(sigmas) => self
                .noise
                .p
                .iter()
                .flat_map(|&p| sigmas.iter().map(move |&sigma| NoisePoint { p, sigma }))
                .collect(),
        }
    }

    fn plan(&self) -> SamplingPlan {
        SamplingPlan {
            max_samples: self.max_samples,
            batch: self.batch,
            target_relative_err: self.precision_cut,
        }
    }
}

/// One emitted simulation record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    /// Physical error rate of the point.
    pub p: f64,
    /// Readout width of the point.
    pub sigma: f64,
    /// Lattice size, for the 3D families.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Measurement rounds, when the protocol uses them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Window half-width, when the protocol uses one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    /// Physical qubits.
    pub n: usize,
    /// Logical qubits.
    pub k: usize,
    /// Samples whose X-error sector failed.
    pub fails_x: u64,
    /// Samples whose Z-error sector failed.
    pub fails_z: u64,
    /// Logical error rate (combined over sectors where both run).
    pub p_l: f64,
    /// Word error rate derived from `p_l` and `k`.
    pub wer: f64,
    /// Error bar on `p_l`.
    pub err: f64,
    /// Wall-clock seconds spent on the point.
    pub seconds: f64,
    /// Samples executed.
    pub samples: u64,
    /// Samples that failed overall.
    pub failures: u64,
    /// Samples whose final state kept a nonzero residual syndrome.
    pub violations: u64,
    /// Error bar on `wer`.
    pub wer_err: f64,
    /// Code family.
    pub family: String,
    /// Protocol that produced the record.
    pub protocol: Protocol,
    /// Effective master seed.
    pub seed: u64,
    /// SHA-256 of the resolved scenario.
    pub config_hash: String,
}

fn wer_slope(p_l: f64, k: usize) -> f64 {
    if p_l >= 1.0 {
        return 0.0;
    }
    let k = k.max(1) as f64;
    ((1.0 / k - 1.0) * (-p_l).ln_1p()).exp() / k
}

fn capacity_algorithm(algorithm: Algorithm) -> CapacityAlgorithm {
    match algorithm {
        Algorithm::Atd => CapacityAlgorithm::AnalogTanner,
        Algorithm::Ssmsa => CapacityAlgorithm::SoftSyndrome,
    }
}

fn window_prior(config: VirtualPriorConfig, sigma: f64) -> VirtualPrior {
    match config {
        VirtualPriorConfig::Analog => VirtualPrior::Analog,
        VirtualPriorConfig::Channel => {
            VirtualPrior::Fixed(prob_to_llr(p_from_sigma(sigma).max(PRIOR_CLAMP)))
        }
        VirtualPriorConfig::FixedP(p) => VirtualPrior::Fixed(prob_to_llr(p.max(PRIOR_CLAMP))),
    }
}

fn run_counts(scenario: &Scenario, code: &CssCode, point: NoisePoint, seed: u64) -> RunCounts {
    let config = scenario.decoder.to_config();
    let plan = scenario.plan();
    match scenario.protocol {
        Protocol::Capacity => {
            let sc = CapacityScenario::new(
                code,
                scenario.noise.channel(point.p),
                point.sigma,
                capacity_algorithm(scenario.algorithm),
                config,
            );
            run_samples(&plan, |i| {
                let o = sc.sample(seed, i);
                SampleVerdict {
                    failed: o.x_error_failed || o.z_error_failed,
                    x_failed: o.x_error_failed,
                    z_failed: o.z_error_failed,
                    violations: 0,
                }
            })
        }
        Protocol::SingleShot => {
            let rounds = scenario.rounds.expect("validated");
            let sc = SingleShotScenario::new(code, point.p, point.sigma, rounds, config);
            run_samples(&plan, |i| {
                let o = sc.sample(seed, i);
                SampleVerdict {
                    failed: o.failed,
                    x_failed: false,
                    z_failed: o.failed,
                    violations: u32::from(o.violation),
                }
            })
        }
        Protocol::Window => {
            let rounds = scenario.rounds.expect("validated");
            let w = scenario.w.expect("validated");
            let sc = WindowScenario::new(
                code,
                point.p,
                point.sigma,
                rounds,
                w,
                window_prior(scenario.virtual_prior, point.sigma),
                config,
            );
            run_samples(&plan, |i| {
                let o = sc.sample(seed, i);
                SampleVerdict {
                    failed: o.failed,
                    x_failed: o.failed,
                    z_failed: false,
                    violations: u32::from(o.violation),
                }
            })
        }
        Protocol::Qss => {
            let rounds = scenario.rounds.expect("validated");
            let w = scenario.w.expect("validated");
            let sc = QssScenario::new(
                code,
                scenario.noise.channel(point.p),
                point.sigma,
                w,
                rounds,
                config,
            );
            run_samples(&plan, |i| {
                let o = sc.sample(seed, i);
                SampleVerdict {
                    failed: o.failed(),
                    x_failed: o.x_error_failed,
                    z_failed: o.z_error_failed,
                    violations: u32::try_from(o.violations).unwrap_or(u32::MAX),
                }
            })
        }
    }
}

/// Runs one sweep point to completion and assembles its record.
#[must_use]
pub fn run_point(
    scenario: &Scenario,
    code: &CssCode,
    manifest: &Manifest,
    point: NoisePoint,
    seed: u64,
    config_hash: &str,
) -> RunRecord {
    let start = Instant::now();
    let counts = run_counts(scenario, code, point, seed);
    let seconds = start.elapsed().as_secs_f64();

    let (p_l, err) = match scenario.protocol {
        Protocol::Capacity | Protocol::Qss => {
            let x = counts.x_estimate();
            let z = counts.z_estimate();
            combine_rates(x.rate(), x.std_err(), z.rate(), z.std_err())
        }
        Protocol::SingleShot => {
            let z = counts.z_estimate();
            (z.rate(), z.std_err())
        }
        Protocol::Window => {
            let x = counts.x_estimate();
            (x.rate(), x.std_err())
        }
    };
    let k = manifest.k.max(1);
    RunRecord {
        p: point.p,
        sigma: point.sigma,
        l: manifest.l,
        rounds: scenario.rounds,
        w: scenario.w,
        n: manifest.n,
        k: manifest.k,
        fails_x: counts.x_failures,
        fails_z: counts.z_failures,
        p_l,
        wer: word_error_rate(p_l, k),
        err,
        seconds,
        samples: counts.samples,
        failures: counts.failures,
        violations: counts.violations,
        wer_err: err * wer_slope(p_l, k),
        family: manifest.family.clone(),
        protocol: scenario.protocol,
        seed,
        config_hash: config_hash.to_string(),
    }
}

/// CSV header matching [`record_csv_row`].
pub const CSV_HEADER: &str = "p,sigma,L,rounds,w,n,k,fails_x,fails_z,p_l,wer,err,seconds,\
samples,failures,violations,wer_err,family,protocol,seed,config_hash";

/// Flattens a record into one CSV row.
#[must_use]
pub fn record_csv_row(r: &RunRecord) -> String {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let protocol = match r.protocol {
        Protocol::Capacity => "capacity",
        Protocol::SingleShot => "single_shot",
        Protocol::Qss => "qss",
        Protocol::Window => "window",
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.p,
        r.sigma,
        opt(r.l),
        opt(r.rounds),
        opt(r.w),
        r.n,
        r.k,
        r.fails_x,
        r.fails_z,
        r.p_l,
        r.wer,
        r.err,
        r.seconds,
        r.samples,
        r.failures,
        r.violations,
        r.wer_err,
        r.family,
        protocol,
        r.seed,
        r.config_hash,
    )
}
