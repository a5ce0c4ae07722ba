//! Workload generator: synthesizes a scenario whose per-sender transaction
//! counts follow a Pareto distribution, so a few senders dominate the
//! traffic the way they do on real shared ledgers.
//!
//! Generation is a pure function of `(params, seed)`. Counts come from
//! inverse-transform sampling of Pareto(alpha, 1), fitted to the requested
//! total by largest-remainder apportionment; submission times are evenly
//! spaced; each transaction depends on its sender's previous one with
//! probability `dep_prob`.

use bvc_core::{Address, ADDRESS_LEN};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scenario::{ConfigOverrides, Scenario, Submission};

/// Workload shape knobs.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct GenParams {
    pub senders: usize,
    pub total_txs: usize,
    /// Pareto tail exponent; 1.16 gives the classic 80/20 skew.
    pub alpha: f64,
    /// Probability that a transaction depends on its sender's previous one.
    pub dep_prob: f64,
    pub width: u16,
    pub value_range: (u64, u64),
    pub fee_range: (u64, u64),
    /// Gap between consecutive submissions, milliseconds.
    pub interval_ms: u64,
}

pub const DEFAULT_ALPHA: f64 = 1.16;

impl Default for GenParams {
    fn default() -> Self {
        Self {
            senders: 10,
            total_txs: 100,
            alpha: DEFAULT_ALPHA,
            dep_prob: 0.25,
            width: 8,
            value_range: (1, 100),
            fee_range: (1, 10),
            interval_ms: 50,
        }
    }
}

/// Errors from infeasible generator parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("cannot place {0} transactions with zero senders")]
    NoSenders(usize),
    #[error("alpha must be a positive finite number, got {0}")]
    BadAlpha(f64),
    #[error("dep_prob {0} outside [0,1]")]
    BadDepProb(f64),
    #[error("width {0} outside 1..=256")]
    BadWidth(u16),
    #[error("empty range: {name} {min}..={max}")]
    EmptyRange { name: &'static str, min: u64, max: u64 },
}

impl GenParams {
    fn validate(&self) -> Result<(), GenError> {
        if self.senders == 0 && self.total_txs > 0 {
            return Err(GenError::NoSenders(self.total_txs));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(GenError::BadAlpha(self.alpha));
        }
        if !(0.0..=1.0).contains(&self.dep_prob) || self.dep_prob.is_nan() {
            return Err(GenError::BadDepProb(self.dep_prob));
        }
        if self.width == 0 || self.width > bvc_core::MAX_WIDTH {
            return Err(GenError::BadWidth(self.width));
        }
        for (name, (min, max)) in
            [("value_range", self.value_range), ("fee_range", self.fee_range)]
        {
            if min > max {
                return Err(GenError::EmptyRange { name, min, max });
            }
        }
        Ok(())
    }
}

/// Readable index-derived address: `0x...0001` for index 0 and so on.
fn index_address(index: usize) -> Address {
    let mut bytes = [0u8; ADDRESS_LEN];
    bytes[ADDRESS_LEN - 8..].copy_from_slice(&(index as u64 + 1).to_be_bytes());
    Address::new(bytes)
}

/// Pareto raw weights fitted to `total` by largest remainder.
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    if weights.is_empty() || total == 0 {
        return vec![0; weights.len()];
    }
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    // Hand the leftover seats to the largest fractional parts, ties to the
    // lower index.
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|a, b| {
        let fa = quotas[*a] - quotas[*a].floor();
        let fb = quotas[*b] - quotas[*b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(b))
    });
    for i in 0..total.saturating_sub(assigned) {
        counts[order[i % order.len()]] += 1;
    }
    counts
}

/// Generates a scenario. Accounts are the senders in index order followed
/// by one receive-only account; each sender is funded with exactly what its
/// transactions spend.
pub fn generate(params: &GenParams, seed: u64) -> Result<Scenario, GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Pareto(alpha, 1) by inverse transform.
    let weights: Vec<f64> = (0..params.senders)
        .map(|_| {
            let u: f64 = rng.random();
            (1.0 - u).max(f64::MIN_POSITIVE).powf(-1.0 / params.alpha)
        })
        .collect();
    let counts = apportion(&weights, params.total_txs);

    let mut slots: Vec<usize> = Vec::with_capacity(params.total_txs);
    for (sender, count) in counts.iter().enumerate() {
        slots.extend(std::iter::repeat(sender).take(*count));
    }
    slots.shuffle(&mut rng);

    let account_count = params.senders + 1;
    let mut spend = vec![0u64; account_count];
    let mut last_label: Vec<Option<String>> = vec![None; params.senders];
    let mut submissions = Vec::with_capacity(slots.len());
    for (j, sender) in slots.iter().enumerate() {
        let deps = match &last_label[*sender] {
            Some(previous) if rng.random::<f64>() < params.dep_prob => {
                vec![previous.clone()]
            }
            _ => Vec::new(),
        };
        let pick = rng.random_range(0..account_count - 1);
        let recipient = if pick >= *sender { pick + 1 } else { pick };
        let value = rng.random_range(params.value_range.0..=params.value_range.1);
        let fee = rng.random_range(params.fee_range.0..=params.fee_range.1);
        let label = format!("t{j:04}");
        spend[*sender] += value + fee;
        last_label[*sender] = Some(label.clone());
        submissions.push(Submission {
            time_ms: j as u64 * params.interval_ms,
            label,
            sender: index_address(*sender),
            recipient: index_address(recipient),
            value,
            fee,
            deps,
        });
    }

    let accounts: Vec<(Address, u64)> =
        (0..account_count).map(|i| (index_address(i), spend[i])).collect();
    Ok(Scenario {
        width: params.width,
        accounts,
        submissions,
        faults: Vec::new(),
        overrides: ConfigOverrides::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_scenarios_revalidate() {
        let scenario = generate(&GenParams::default(), 1).unwrap();
        assert_eq!(scenario.submissions.len(), 100);
        // The emitted TOML loads back as an equal scenario, which runs the
        // whole validation gauntlet.
        let text = scenario.to_toml_string();
        let back = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(scenario, back);
    }

    #[test]
    fn identical_inputs_generate_identical_scenarios() {
        let a = generate(&GenParams::default(), 42).unwrap();
        let b = generate(&GenParams::default(), 42).unwrap();
        assert_eq!(a, b);
        let c = generate(&GenParams::default(), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn senders_are_funded_exactly() {
        let scenario = generate(&GenParams::default(), 7).unwrap();
        for (address, balance) in &scenario.accounts {
            let spend: u64 = scenario
                .submissions
                .iter()
                .filter(|s| s.sender == *address)
                .map(|s| s.value + s.fee)
                .sum();
            assert_eq!(*balance, spend);
        }
    }

    #[test]
    fn dep_prob_zero_and_one() {
        let none = generate(&GenParams { dep_prob: 0.0, ..GenParams::default() }, 3).unwrap();
        assert!(none.submissions.iter().all(|s| s.deps.is_empty()));

        let all = generate(&GenParams { dep_prob: 1.0, ..GenParams::default() }, 3).unwrap();
        // Every tx after a sender's first depends on the previous one:
        // exactly (total - senders_with_traffic) dependency edges.
        let senders_with_traffic: std::collections::BTreeSet<_> =
            all.submissions.iter().map(|s| s.sender).collect();
        let edges = all.submissions.iter().filter(|s| !s.deps.is_empty()).count();
        assert_eq!(edges, all.submissions.len() - senders_with_traffic.len());
        // And each dep is the sender's immediately preceding label.
        let mut last: std::collections::BTreeMap<Address, String> = Default::default();
        for s in &all.submissions {
            if let Some(previous) = last.get(&s.sender) {
                assert_eq!(&s.deps, &vec![previous.clone()]);
            } else {
                assert!(s.deps.is_empty());
            }
            last.insert(s.sender, s.label.clone());
        }
    }

    #[test]
    fn counts_fit_the_requested_total() {
        for seed in 0..5 {
            let scenario =
                generate(&GenParams { total_txs: 37, ..GenParams::default() }, seed).unwrap();
            assert_eq!(scenario.submissions.len(), 37);
        }
    }

    #[test]
    fn infeasible_params_are_refused() {
        let bad = GenParams { senders: 0, total_txs: 5, ..GenParams::default() };
        assert_eq!(generate(&bad, 0), Err(GenError::NoSenders(5)));
        let bad = GenParams { alpha: 0.0, ..GenParams::default() };
        assert_eq!(generate(&bad, 0), Err(GenError::BadAlpha(0.0)));
        let bad = GenParams { dep_prob: 1.5, ..GenParams::default() };
        assert_eq!(generate(&bad, 0), Err(GenError::BadDepProb(1.5)));
        let bad = GenParams { width: 0, ..GenParams::default() };
        assert_eq!(generate(&bad, 0), Err(GenError::BadWidth(0)));
        let bad = GenParams { value_range: (9, 3), ..GenParams::default() };
        assert!(matches!(generate(&bad, 0), Err(GenError::EmptyRange { .. })));
    }

    #[test]
    fn empty_workload_is_fine() {
        let scenario =
            generate(&GenParams { senders: 0, total_txs: 0, ..GenParams::default() }, 0).unwrap();
        assert!(scenario.submissions.is_empty());
        assert_eq!(scenario.accounts.len(), 1);
    }

    #[test]
    fn pareto_counts_are_heavy_tailed() {
        // With alpha near 1.16 the largest fifth of senders should carry
        // most of the traffic. Averaged over 20 seeds with 50 senders and
        // 2000 txs the measured top-20% share is ~0.80; assert a floor
        // comfortably below the measurement but far above the uniform 0.20.
        let params = GenParams { senders: 50, total_txs: 2000, ..GenParams::default() };
        let mut shares = Vec::new();
        for seed in 0..20 {
            let scenario = generate(&params, seed).unwrap();
            let mut counts: std::collections::BTreeMap<Address, usize> = Default::default();
            for s in &scenario.submissions {
                *counts.entry(s.sender).or_default() += 1;
            }
            let mut by_count: Vec<usize> = counts.values().copied().collect();
            by_count.sort_unstable_by(|a, b| b.cmp(a));
            let top = by_count.iter().take(10).sum::<usize>() as f64;
            shares.push(top / 2000.0);
        }
        let mean = shares.iter().sum::<f64>() / shares.len() as f64;
        assert!(mean > 0.55, "top-20% share {mean:.3} not heavy-tailed");
        assert!(mean < 1.0);
    }
}
