//! Deterministic parallel Monte Carlo driver.
//!
//! Samples are independent tasks keyed by their index, so any thread count
//! produces the same counts: work is dispatched in fixed batches, each batch
//! is reduced to order-independent counters, and the stopping rule is only
//! consulted on batch boundaries, exactly like the sequential estimator in
//! the core crate.

use qldpc_core::sim::{RateEstimate, SamplingPlan};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Outcome of one Monte Carlo sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampleVerdict {
    /// The sample counts as a failure for the stopping rule.
    pub failed: bool,
    /// The X-error sector failed.
    pub x_failed: bool,
    /// The Z-error sector failed.
    pub z_failed: bool,
    /// Residual-syndrome violations observed in this sample.
    pub violations: u32,
}

/// Aggregated counters over all executed samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunCounts {
    /// Samples executed.
    pub samples: u64,
    /// Samples that failed overall.
    pub failures: u64,
    /// Samples whose X-error sector failed.
    pub x_failures: u64,
    /// Samples whose Z-error sector failed.
    pub z_failures: u64,
    /// Total residual-syndrome violations.
    pub violations: u64,
}

impl RunCounts {
    fn absorb(&mut self, v: SampleVerdict) {
        self.samples += 1;
        self.failures += u64::from(v.failed);
        self.x_failures += u64::from(v.x_failed);
        self.z_failures += u64::from(v.z_failed);
        self.violations += u64::from(v.violations);
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.failures += other.failures;
        self.x_failures += other.x_failures;
        self.z_failures += other.z_failures;
        self.violations += other.violations;
        self
    }

    /// Overall failure-rate estimate.
    #[must_use]
    pub fn rate_estimate(&self) -> RateEstimate {
        RateEstimate { failures: self.failures, samples: self.samples }
    }

    /// X-sector failure-rate estimate.
    #[must_use]
    pub fn x_estimate(&self) -> RateEstimate {
        RateEstimate { failures: self.x_failures, samples: self.samples }
    }

    /// Z-sector failure-rate estimate.
    #[must_use]
    pub fn z_estimate(&self) -> RateEstimate {
        RateEstimate { failures: self.z_failures, samples: self.samples }
    }
}

/// Runs samples `0, 1, 2, ...` under `plan`, in parallel batches.
///
/// Stops at `plan.max_samples`, or on a batch boundary once at least one
/// failure was seen and the relative error of the overall failure rate has
/// dropped below `plan.target_relative_err`. The result is identical to a
/// sequential run for any worker-pool size.
pub fn run_samples<F>(plan: &SamplingPlan, sample: F) -> RunCounts
where
    F: Fn(u64) -> SampleVerdict + Sync,
{
    let batch = plan.batch.max(1);
    let mut counts = RunCounts::default();
    while counts.samples < plan.max_samples {
        let take = batch.min(plan.max_samples - counts.samples);
        let start = counts.samples;
        let chunk = (start..start + take)
            .into_par_iter()
            .map(&sample)
            .fold(RunCounts::default, |mut acc, v| {
                acc.absorb(v);
                acc
            })
            .reduce(RunCounts::default, RunCounts::merge);
        counts = counts.merge(chunk);
        let estimate = counts.rate_estimate();
        if counts.failures > 0 && estimate.relative_err() < plan.target_relative_err {
            break;
        }
    }
    counts
}

/// SHA-256 hex digest of a value's canonical JSON serialization.
///
/// Stamped on every emitted record so results can be traced back to the
/// exact resolved configuration.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(failed: bool) -> SampleVerdict {
        SampleVerdict { failed, x_failed: failed, z_failed: false, violations: 0 }
    }

    #[test]
    fn parallel_counts_match_sequential_rule() {
        let plan = SamplingPlan { max_samples: 1000, batch: 100, target_relative_err: 0.2 };
        let sample = |i: u64| verdict(i % 7 == 0);
        let counts = run_samples(&plan, sample);

        let mut failures = 0u64;
        let mut samples = 0u64;
        while samples < plan.max_samples {
            for i in samples..samples + plan.batch {
                failures += u64::from(i % 7 == 0);
            }
            samples += plan.batch;
            let est = RateEstimate { failures, samples };
            if failures > 0 && est.relative_err() < plan.target_relative_err {
                break;
            }
        }
        assert_eq!(counts.samples, samples);
        assert_eq!(counts.failures, failures);
        assert_eq!(counts.x_failures, failures);
    }

    #[test]
    fn cap_is_respected_without_failures() {
        let plan = SamplingPlan { max_samples: 250, batch: 64, target_relative_err: 0.5 };
        let counts = run_samples(&plan, |_| SampleVerdict::default());
        assert_eq!(counts.samples, 250);
        assert_eq!(counts.failures, 0);
    }

    #[test]
    fn config_hash_is_stable_and_input_sensitive() {
        let a = config_hash(&("scenario", 3));
        let b = config_hash(&("scenario", 3));
        let c = config_hash(&("scenario", 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }
}
