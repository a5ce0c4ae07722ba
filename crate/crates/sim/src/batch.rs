//! Batch drivers: the two-mode comparison and multi-seed sweeps.
//!
//! Both have sequential and data-parallel forms. The `parallel` feature
//! picks rayon for the unsuffixed entry points; the `_seq` variants stay
//! available for benchmarking one against the other. Runs share nothing
//! mutable, so the parallel forms give identical results in a different
//! wall-clock order.

use crate::metrics::Metrics;
use crate::scenario::{Mode, Scenario, SimConfig};
use crate::sim::{run, RunOutput, SimError};

/// Paired runs of one scenario under both ordering policies, identical in
/// every knob but the mode. Same seed means identical fault draws, so any
/// difference in outcomes is the ordering policy's.
pub struct CompareOutput {
    pub bvc: RunOutput,
    pub nonce: RunOutput,
}

impl CompareOutput {
    /// Confirmed-count advantage of the bit-clock run.
    pub fn confirmed_delta(&self) -> i64 {
        self.bvc.metrics.aggregates.confirmed as i64 - self.nonce.metrics.aggregates.confirmed as i64
    }

    /// Stalled-count advantage (negative is good) of the bit-clock run.
    pub fn stalled_delta(&self) -> i64 {
        self.bvc.metrics.aggregates.stalled as i64 - self.nonce.metrics.aggregates.stalled as i64
    }
}

/// Runs the scenario once per mode with the same seed and knobs.
pub fn run_compare(scenario: &Scenario, base: &SimConfig) -> Result<CompareOutput, SimError> {
    let bvc_config = SimConfig { mode: Mode::Bvc, ..*base };
    let nonce_config = SimConfig { mode: Mode::Nonce, ..*base };
    #[cfg(feature = "parallel")]
    {
        let (bvc, nonce) = rayon::join(
            || run(scenario, &bvc_config),
            || run(scenario, &nonce_config),
        );
        Ok(CompareOutput { bvc: bvc?, nonce: nonce? })
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(CompareOutput {
            bvc: run(scenario, &bvc_config)?,
            nonce: run(scenario, &nonce_config)?,
        })
    }
}

/// Sequential sweep: one run per seed, metrics in seed order.
pub fn run_seed_sweep_seq(
    scenario: &Scenario,
    base: &SimConfig,
    seeds: &[u64],
) -> Result<Vec<Metrics>, SimError> {
    seeds
        .iter()
        .map(|&seed| {
            let config = SimConfig { seed, ..*base };
            run(scenario, &config).map(|out| out.metrics)
        })
        .collect()
}

/// Rayon sweep with the same contract as [`run_seed_sweep_seq`].
#[cfg(feature = "parallel")]
pub fn run_seed_sweep_par(
    scenario: &Scenario,
    base: &SimConfig,
    seeds: &[u64],
) -> Result<Vec<Metrics>, SimError> {
    use rayon::prelude::*;
    seeds
        .par_iter()
        .map(|&seed| {
            let config = SimConfig { seed, ..*base };
            run(scenario, &config).map(|out| out.metrics)
        })
        .collect()
}

/// One run per seed; parallel when the `parallel` feature is on.
pub fn run_seed_sweep(
    scenario: &Scenario,
    base: &SimConfig,
    seeds: &[u64],
) -> Result<Vec<Metrics>, SimError> {
    #[cfg(feature = "parallel")]
    {
        run_seed_sweep_par(scenario, base, seeds)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_seed_sweep_seq(scenario, base, seeds)
    }
}
