//! Per-transaction records and run aggregates, the serializable half of a
//! run's output.

use serde::{Deserialize, Serialize};

/// Final status of a submitted transaction, as seen by the observer node
/// at the horizon.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxStatus {
    /// Included in a block on the canonical chain.
    Confirmed,
    /// Still pending at the horizon.
    Stalled,
    /// Evicted: its ordering slot was consumed by something else.
    Invalidated,
    /// Evicted: outlived the pool TTL.
    Expired,
    /// Lost in transit, by fault injection or drop probability.
    Dropped,
}

impl TxStatus {
    pub fn code(&self) -> &'static str {
        match self {
            TxStatus::Confirmed => "confirmed",
            TxStatus::Stalled => "stalled",
            TxStatus::Invalidated => "invalidated",
            TxStatus::Expired => "expired",
            TxStatus::Dropped => "dropped",
        }
    }
}

/// One submission's fate.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TxRecord {
    pub label: String,
    /// Full hex transaction id.
    pub id: String,
    /// Canonical hex sender address.
    pub sender: String,
    pub submit_ms: u64,
    pub status: TxStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confirm_ms: Option<u64>,
    /// Height of the confirming block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confirm_block: Option<u64>,
    /// Position in the global confirmation order, counting from 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confirm_step: Option<u64>,
}

impl TxRecord {
    pub fn latency_ms(&self) -> Option<u64> {
        self.confirm_ms.map(|c| c.saturating_sub(self.submit_ms))
    }
}

/// Whole-run aggregates.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Aggregates {
    pub submitted: u64,
    pub confirmed: u64,
    pub stalled: u64,
    pub invalidated: u64,
    pub expired: u64,
    pub dropped: u64,
    pub blocks_produced: u64,
    /// Mean of confirm latency over confirmed transactions, milliseconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_latency_ms: Option<f64>,
    /// Nearest-rank 95th percentile of confirm latency, milliseconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p95_latency_ms: Option<u64>,
    /// Mean observer-node pool size sampled at each production slot.
    pub mean_pool_occupancy: f64,
}

/// Metrics of one run.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Metrics {
    pub per_tx: Vec<TxRecord>,
    pub aggregates: Aggregates,
}

impl Metrics {
    /// Builds aggregates from per-transaction records plus the run-level
    /// samples the records do not carry.
    pub fn from_records(
        per_tx: Vec<TxRecord>,
        blocks_produced: u64,
        pool_samples: &[usize],
    ) -> Self {
        let count = |status: TxStatus| -> u64 {
            per_tx.iter().filter(|r| r.status == status).count() as u64
        };
        let mut latencies: Vec<u64> = per_tx.iter().filter_map(|r| r.latency_ms()).collect();
        latencies.sort_unstable();
        let mean_latency_ms = if latencies.is_empty() {
            None
        } else {
            Some(latencies.iter().sum::<u64>() as f64 / latencies.len() as f64)
        };
        let p95_latency_ms = percentile_nearest_rank(&latencies, 95);
        let mean_pool_occupancy = if pool_samples.is_empty() {
            0.0
        } else {
            pool_samples.iter().sum::<usize>() as f64 / pool_samples.len() as f64
        };
        let aggregates = Aggregates {
            submitted: per_tx.len() as u64,
            confirmed: count(TxStatus::Confirmed),
            stalled: count(TxStatus::Stalled),
            invalidated: count(TxStatus::Invalidated),
            expired: count(TxStatus::Expired),
            dropped: count(TxStatus::Dropped),
            blocks_produced,
            mean_latency_ms,
            p95_latency_ms,
            mean_pool_occupancy,
        };
        Self { per_tx, aggregates }
    }

    pub fn record(&self, label: &str) -> Option<&TxRecord> {
        self.per_tx.iter().find(|r| r.label == label)
    }

    pub fn status_of(&self, label: &str) -> Option<TxStatus> {
        self.record(label).map(|r| r.status)
    }
}

/// Nearest-rank percentile over a sorted slice: element at rank
/// `ceil(p/100 * n)`, 1-based.
fn percentile_nearest_rank(sorted: &[u64], p: u64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len() as u64;
    let rank = (p * n).div_ceil(100).max(1);
    Some(sorted[(rank - 1) as usize])
}
