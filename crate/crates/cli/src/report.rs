//! JSON shapes the command line tool emits. `schema_version` bumps on any
//! breaking change to these structs.

use bvc_sim::{Metrics, Mode, SimConfig};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// The fully resolved knobs a run used.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ConfigReport {
    pub mode: String,
    pub seed: u64,
    pub node_count: usize,
    pub block_interval_ms: u64,
    pub latency_min_ms: u64,
    pub latency_max_ms: u64,
    pub drop_probability: f64,
    pub max_block_txs: usize,
    pub horizon_ms: u64,
    pub ttl_blocks: u64,
}

impl ConfigReport {
    pub fn from_config(config: &SimConfig) -> Self {
        Self {
            mode: match config.mode {
                Mode::Bvc => "bvc".to_string(),
                Mode::Nonce => "nonce".to_string(),
            },
            seed: config.seed,
            node_count: config.node_count,
            block_interval_ms: config.block_interval_ms,
            latency_min_ms: config.latency_min_ms,
            latency_max_ms: config.latency_max_ms,
            drop_probability: config.drop_probability,
            max_block_txs: config.max_block_txs,
            horizon_ms: config.horizon_ms,
            ttl_blocks: config.ttl_blocks,
        }
    }
}

/// Output of `bvc run`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: String,
    pub config: ConfigReport,
    /// Hex SHA-256 of the event trace; equal hashes mean identical runs.
    pub trace_hash: String,
    pub metrics: Metrics,
}

/// One mode's half of a comparison.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SideReport {
    pub config: ConfigReport,
    pub trace_hash: String,
    pub metrics: Metrics,
}

/// Aggregate differences, bit-clock minus nonce.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    pub confirmed: i64,
    pub stalled: i64,
    pub invalidated: i64,
    pub expired: i64,
    pub dropped: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_latency_ms: Option<f64>,
}

impl DeltaReport {
    pub fn between(bvc: &Metrics, nonce: &Metrics) -> Self {
        let a = &bvc.aggregates;
        let b = &nonce.aggregates;
        let diff = |x: u64, y: u64| x as i64 - y as i64;
        Self {
            confirmed: diff(a.confirmed, b.confirmed),
            stalled: diff(a.stalled, b.stalled),
            invalidated: diff(a.invalidated, b.invalidated),
            expired: diff(a.expired, b.expired),
            dropped: diff(a.dropped, b.dropped),
            mean_latency_ms: match (a.mean_latency_ms, b.mean_latency_ms) {
                (Some(x), Some(y)) => Some(x - y),
                _ => None,
            },
        }
    }
}

/// Output of `bvc compare`: both modes under identical faults.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema_version: u32,
    pub scenario: String,
    pub bvc: SideReport,
    pub nonce: SideReport,
    pub delta: DeltaReport,
}

/// Output of `bvc lattice`: every mask of the width with the pairwise
/// comparability matrix, rows and columns indexed by mask value.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct LatticeReport {
    pub schema_version: u32,
    pub width: u16,
    pub masks: Vec<String>,
    /// Unordered mask pairs with no happened-before either way.
    pub incomparable_pairs: u64,
    /// One string per row; letters B (row before column), A (after),
    /// E (equal), I (incomparable).
    pub matrix: Vec<String>,
}
