//! Scenario files: the declarative input to a simulation run.
//!
//! A scenario is TOML with four top-level keys plus an optional `config`
//! table of overrides:
//!
//! ```toml
//! width = 3
//!
//! [[accounts]]
//! address = "0xaa"
//! balance = 100
//!
//! [[submissions]]
//! time = 0
//! label = "t1"
//! sender = "0xaa"
//! recipient = "0xbb"
//! value = 10
//! fee = 1
//! deps = []
//!
//! [[faults]]
//! kind = "drop"
//! label = "t1"
//! ```
//!
//! Validation is positional: errors name the offending entry by index and
//! label. Dependencies must reference an earlier submission of the same
//! sender, each sender's times must be non-decreasing, and every address
//! must be declared under `accounts`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use bvc_core::{Address, AddressParseError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_NODE_COUNT: usize = 3;
pub const DEFAULT_BLOCK_INTERVAL_MS: u64 = 1_000;
pub const DEFAULT_LATENCY_MIN_MS: u64 = 10;
pub const DEFAULT_LATENCY_MAX_MS: u64 = 50;
pub const DEFAULT_DROP_PROBABILITY: f64 = 0.0;
pub const DEFAULT_MAX_BLOCK_TXS: usize = 128;
pub const DEFAULT_HORIZON_MS: u64 = 10_000;

/// Which ordering policy a run uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Bvc,
    Nonce,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Bvc => "bvc",
            Mode::Nonce => "nonce",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bvc" => Ok(Mode::Bvc),
            "nonce" => Ok(Mode::Nonce),
            other => Err(format!("unknown mode {other:?}, expected bvc or nonce")),
        }
    }
}

/// Optional `config` table of a scenario: any subset of the run knobs.
#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_interval_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_min_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_max_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop_probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_block_txs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ttl_blocks: Option<u64>,
}

impl ConfigOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// Errors from an ill-formed run configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("latency_min_ms {min} exceeds latency_max_ms {max}")]
    LatencyOrder { min: u64, max: u64 },
    #[error("drop_probability {0} outside [0,1]")]
    DropRange(f64),
    #[error("horizon_ms must be positive")]
    ZeroHorizon,
    #[error("block_interval_ms must be positive")]
    ZeroInterval,
    #[error("node_count must be at least 1")]
    ZeroNodes,
    #[error("max_block_txs must be at least 1")]
    ZeroBlockTxs,
}

/// Fully resolved run configuration. Precedence: defaults, then scenario
/// overrides, then whatever the caller sets explicitly on top.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SimConfig {
    pub mode: Mode,
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

impl SimConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            seed: DEFAULT_SEED,
            node_count: DEFAULT_NODE_COUNT,
            block_interval_ms: DEFAULT_BLOCK_INTERVAL_MS,
            latency_min_ms: DEFAULT_LATENCY_MIN_MS,
            latency_max_ms: DEFAULT_LATENCY_MAX_MS,
            drop_probability: DEFAULT_DROP_PROBABILITY,
            max_block_txs: DEFAULT_MAX_BLOCK_TXS,
            horizon_ms: DEFAULT_HORIZON_MS,
            ttl_blocks: bvc_core::mempool::DEFAULT_TTL_BLOCKS,
        }
    }

    /// Defaults with the scenario's `config` table folded in.
    pub fn for_scenario(mode: Mode, scenario: &Scenario) -> Self {
        let mut config = Self::new(mode);
        config.apply_overrides(&scenario.overrides);
        config
    }

    pub fn apply_overrides(&mut self, overrides: &ConfigOverrides) {
        if let Some(v) = overrides.seed {
            self.seed = v;
        }
        if let Some(v) = overrides.node_count {
            self.node_count = v;
        }
        if let Some(v) = overrides.block_interval_ms {
            self.block_interval_ms = v;
        }
        if let Some(v) = overrides.latency_min_ms {
            self.latency_min_ms = v;
        }
        if let Some(v) = overrides.latency_max_ms {
            self.latency_max_ms = v;
        }
        if let Some(v) = overrides.drop_probability {
            self.drop_probability = v;
        }
        if let Some(v) = overrides.max_block_txs {
            self.max_block_txs = v;
        }
        if let Some(v) = overrides.horizon_ms {
            self.horizon_ms = v;
        }
        if let Some(v) = overrides.ttl_blocks {
            self.ttl_blocks = v;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.latency_min_ms > self.latency_max_ms {
            return Err(ConfigError::LatencyOrder {
                min: self.latency_min_ms,
                max: self.latency_max_ms,
            });
        }
        if !(0.0..=1.0).contains(&self.drop_probability) || self.drop_probability.is_nan() {
            return Err(ConfigError::DropRange(self.drop_probability));
        }
        if self.horizon_ms == 0 {
            return Err(ConfigError::ZeroHorizon);
        }
        if self.block_interval_ms == 0 {
            return Err(ConfigError::ZeroInterval);
        }
        if self.node_count == 0 {
            return Err(ConfigError::ZeroNodes);
        }
        if self.max_block_txs == 0 {
            return Err(ConfigError::ZeroBlockTxs);
        }
        Ok(())
    }
}

/// One scheduled transaction submission.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Submission {
    pub time_ms: u64,
    pub label: String,
    pub sender: Address,
    pub recipient: Address,
    pub value: u64,
    pub fee: u64,
    /// Labels of earlier submissions by the same sender.
    pub deps: Vec<String>,
}

/// An injected fault keyed by submission label. A drop beats any delay on
/// the same label; multiple delays accumulate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Fault {
    Drop { label: String },
    Delay { label: String, ms: u64 },
}

impl Fault {
    pub fn label(&self) -> &str {
        match self {
            Fault::Drop { label } => label,
            Fault::Delay { label, .. } => label,
        }
    }
}

/// A validated scenario.
#[derive(Clone, PartialEq, Debug)]
pub struct Scenario {
    pub width: u16,
    pub accounts: Vec<(Address, u64)>,
    pub submissions: Vec<Submission>,
    pub faults: Vec<Fault>,
    pub overrides: ConfigOverrides,
}

/// What specifically is wrong with one submission.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubmissionProblem {
    #[error("label is empty or has characters outside [A-Za-z0-9_.-]")]
    BadLabel,
    #[error("duplicate label")]
    DuplicateLabel,
    #[error("bad sender address: {0}")]
    BadSender(AddressParseError),
    #[error("bad recipient address: {0}")]
    BadRecipient(AddressParseError),
    #[error("sender {0} not declared under accounts")]
    UnknownSender(Address),
    #[error("recipient {0} not declared under accounts")]
    UnknownRecipient(Address),
    #[error("depends on its own label")]
    SelfDependency,
    #[error("unknown dependency label {0:?}")]
    UnknownDependency(String),
    #[error("dependency {0:?} is declared later in the file")]
    ForwardDependency(String),
    #[error("dependency {0:?} belongs to a different sender")]
    ForeignDependency(String),
    #[error("time {time} is before the sender's previous submission at {previous}")]
    TimeRegression { time: u64, previous: u64 },
}

/// Errors from loading or validating a scenario.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {0}")]
    Parse(String),
    #[error("width {0} outside 1..=256")]
    Width(u16),
    #[error("account {index}: bad address {text:?}: {source}")]
    Address { index: usize, text: String, source: AddressParseError },
    #[error("account {index}: duplicate address {address}")]
    DuplicateAccount { index: usize, address: Address },
    #[error("submission {index} ({label:?}): {problem}")]
    Submission { index: usize, label: String, problem: SubmissionProblem },
    #[error("fault {index}: unknown label {label:?}")]
    FaultLabel { index: usize, label: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    width: u16,
    #[serde(default)]
    accounts: Vec<RawAccount>,
    #[serde(default)]
    submissions: Vec<RawSubmission>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    faults: Vec<RawFault>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<ConfigOverrides>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAccount {
    address: String,
    balance: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubmission {
    time: u64,
    label: String,
    sender: String,
    recipient: String,
    value: u64,
    fee: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    deps: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawFault {
    Drop { label: String },
    Delay { label: String, ms: u64 },
}

fn label_ok(label: &str) -> bool {
    !label.is_empty()
        && label
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-')
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    fn from_raw(raw: RawScenario) -> Result<Self, ScenarioError> {
        if raw.width == 0 || raw.width > bvc_core::MAX_WIDTH {
            return Err(ScenarioError::Width(raw.width));
        }
        let mut accounts = Vec::with_capacity(raw.accounts.len());
        for (index, account) in raw.accounts.iter().enumerate() {
            let address = Address::from_hex(&account.address).map_err(|source| {
                ScenarioError::Address { index, text: account.address.clone(), source }
            })?;
            if accounts.iter().any(|(a, _)| *a == address) {
                return Err(ScenarioError::DuplicateAccount { index, address });
            }
            accounts.push((address, account.balance));
        }

        // Full label map first, so unknown and forward references are told
        // apart.
        let mut label_index = std::collections::BTreeMap::new();
        for (index, sub) in raw.submissions.iter().enumerate() {
            let fail = |problem| ScenarioError::Submission {
                index,
                label: sub.label.clone(),
                problem,
            };
            if !label_ok(&sub.label) {
                return Err(fail(SubmissionProblem::BadLabel));
            }
            if label_index.insert(sub.label.clone(), index).is_some() {
                return Err(fail(SubmissionProblem::DuplicateLabel));
            }
        }

        let mut submissions = Vec::with_capacity(raw.submissions.len());
        let mut last_time: std::collections::BTreeMap<Address, u64> =
            std::collections::BTreeMap::new();
        for (index, sub) in raw.submissions.iter().enumerate() {
            let fail = |problem| ScenarioError::Submission {
                index,
                label: sub.label.clone(),
                problem,
            };
            let sender = Address::from_hex(&sub.sender)
                .map_err(|e| fail(SubmissionProblem::BadSender(e)))?;
            let recipient = Address::from_hex(&sub.recipient)
                .map_err(|e| fail(SubmissionProblem::BadRecipient(e)))?;
            if !accounts.iter().any(|(a, _)| *a == sender) {
                return Err(fail(SubmissionProblem::UnknownSender(sender)));
            }
            if !accounts.iter().any(|(a, _)| *a == recipient) {
                return Err(fail(SubmissionProblem::UnknownRecipient(recipient)));
            }
            for dep in &sub.deps {
                if *dep == sub.label {
                    return Err(fail(SubmissionProblem::SelfDependency));
                }
                match label_index.get(dep) {
                    None => return Err(fail(SubmissionProblem::UnknownDependency(dep.clone()))),
                    Some(dep_index) if *dep_index > index => {
                        return Err(fail(SubmissionProblem::ForwardDependency(dep.clone())))
                    }
                    Some(dep_index) => {
                        let dep_sender = Address::from_hex(&raw.submissions[*dep_index].sender)
                            .expect("validated in an earlier pass");
                        if dep_sender != sender {
                            return Err(fail(SubmissionProblem::ForeignDependency(dep.clone())));
                        }
                    }
                }
            }
            if let Some(previous) = last_time.get(&sender) {
                if sub.time < *previous {
                    return Err(fail(SubmissionProblem::TimeRegression {
                        time: sub.time,
                        previous: *previous,
                    }));
                }
            }
            last_time.insert(sender, sub.time);
            submissions.push(Submission {
                time_ms: sub.time,
                label: sub.label.clone(),
                sender,
                recipient,
                value: sub.value,
                fee: sub.fee,
                deps: sub.deps.clone(),
            });
        }

        let mut faults = Vec::with_capacity(raw.faults.len());
        for (index, fault) in raw.faults.into_iter().enumerate() {
            let (label, built) = match fault {
                RawFault::Drop { label } => (label.clone(), Fault::Drop { label }),
                RawFault::Delay { label, ms } => (label.clone(), Fault::Delay { label, ms }),
            };
            if !label_index.contains_key(&label) {
                return Err(ScenarioError::FaultLabel { index, label });
            }
            faults.push(built);
        }

        Ok(Self {
            width: raw.width,
            accounts,
            submissions,
            faults,
            overrides: raw.config.unwrap_or_default(),
        })
    }

    pub fn to_toml_string(&self) -> String {
        let raw = RawScenario {
            width: self.width,
            accounts: self
                .accounts
                .iter()
                .map(|(address, balance)| RawAccount {
                    address: address.to_string(),
                    balance: *balance,
                })
                .collect(),
            submissions: self
                .submissions
                .iter()
                .map(|s| RawSubmission {
                    time: s.time_ms,
                    label: s.label.clone(),
                    sender: s.sender.to_string(),
                    recipient: s.recipient.to_string(),
                    value: s.value,
                    fee: s.fee,
                    deps: s.deps.clone(),
                })
                .collect(),
            faults: self
                .faults
                .iter()
                .map(|f| match f {
                    Fault::Drop { label } => RawFault::Drop { label: label.clone() },
                    Fault::Delay { label, ms } => {
                        RawFault::Delay { label: label.clone(), ms: *ms }
                    }
                })
                .collect(),
            config: if self.overrides.is_empty() { None } else { Some(self.overrides) },
        };
        toml::to_string_pretty(&raw).expect("validated scenario serializes")
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_toml_string())
    }

    pub fn submission_index(&self, label: &str) -> Option<usize> {
        self.submissions.iter().position(|s| s.label == label)
    }

    /// Resolved dependency indices of submission `i`.
    pub fn dep_indices(&self, i: usize) -> Vec<usize> {
        self.submissions[i]
            .deps
            .iter()
            .map(|dep| self.submission_index(dep).expect("validated"))
            .collect()
    }

    /// Effective fault for submission `i`: `(dropped, extra delay)`.
    pub fn fault_for(&self, i: usize) -> (bool, u64) {
        let label = &self.submissions[i].label;
        let mut dropped = false;
        let mut delay = 0u64;
        for fault in &self.faults {
            if fault.label() != label {
                continue;
            }
            match fault {
                Fault::Drop { .. } => dropped = true,
                Fault::Delay { ms, .. } => delay = delay.saturating_add(*ms),
            }
        }
        (dropped, delay)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WALKTHROUGH: &str = r#"
width = 3

[[accounts]]
address = "0xa11ce"
balance = 100

[[accounts]]
address = "0xb0b"
balance = 50

[[submissions]]
time = 0
label = "t1"
sender = "0xa11ce"
recipient = "0xb0b"
value = 10
fee = 1

[[submissions]]
time = 100
label = "t2"
sender = "0xa11ce"
recipient = "0xb0b"
value = 5
fee = 1
deps = ["t1"]

[[submissions]]
time = 200
label = "t3"
sender = "0xa11ce"
recipient = "0xb0b"
value = 7
fee = 2
"#;

    #[test]
    fn loads_a_walkthrough_scenario() {
        let s = Scenario::from_toml_str(WALKTHROUGH).unwrap();
        assert_eq!(s.width, 3);
        assert_eq!(s.accounts.len(), 2);
        assert_eq!(s.submissions.len(), 3);
        assert_eq!(s.submissions[1].deps, vec!["t1".to_string()]);
        assert_eq!(s.dep_indices(1), vec![0]);
        assert!(s.faults.is_empty());
        assert!(s.overrides.is_empty());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut s = Scenario::from_toml_str(WALKTHROUGH).unwrap();
        s.faults.push(Fault::Drop { label: "t1".into() });
        s.faults.push(Fault::Delay { label: "t2".into(), ms: 500 });
        s.overrides.seed = Some(7);
        s.overrides.horizon_ms = Some(5_000);
        let text = s.to_toml_string();
        let back = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(s, back);
    }

    fn replace(from: &str, to: &str) -> Result<Scenario, ScenarioError> {
        Scenario::from_toml_str(&WALKTHROUGH.replace(from, to))
    }

    #[test]
    fn rejects_bad_width() {
        assert!(matches!(replace("width = 3", "width = 0"), Err(ScenarioError::Width(0))));
        assert!(matches!(replace("width = 3", "width = 300"), Err(ScenarioError::Width(300))));
    }

    #[test]
    fn rejects_duplicate_label_positionally() {
        let err = replace("label = \"t3\"", "label = \"t1\"").unwrap_err();
        match err {
            ScenarioError::Submission { index, label, problem } => {
                assert_eq!(index, 2);
                assert_eq!(label, "t1");
                assert_eq!(problem, SubmissionProblem::DuplicateLabel);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn tells_unknown_forward_self_and_foreign_deps_apart() {
        let err = replace("deps = [\"t1\"]", "deps = [\"nope\"]").unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Submission { problem: SubmissionProblem::UnknownDependency(_), .. }
        ));
        let err = replace("deps = [\"t1\"]", "deps = [\"t3\"]").unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Submission { problem: SubmissionProblem::ForwardDependency(_), .. }
        ));
        let err = replace("deps = [\"t1\"]", "deps = [\"t2\"]").unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Submission { problem: SubmissionProblem::SelfDependency, .. }
        ));
        let foreign = WALKTHROUGH.replace(
            "label = \"t3\"\nsender = \"0xa11ce\"",
            "label = \"t3\"\nsender = \"0xb0b\"",
        );
        let foreign = foreign.replace("fee = 2", "fee = 2\ndeps = [\"t1\"]");
        let err = Scenario::from_toml_str(&foreign).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Submission { problem: SubmissionProblem::ForeignDependency(_), .. }
        ));
    }

    #[test]
    fn rejects_undeclared_addresses() {
        let err = replace("recipient = \"0xb0b\"\nvalue = 7", "recipient = \"0xcafe\"\nvalue = 7")
            .unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Submission { problem: SubmissionProblem::UnknownRecipient(_), .. }
        ));
    }

    #[test]
    fn rejects_time_regression_per_sender() {
        let err = replace("time = 200", "time = 50").unwrap_err();
        match err {
            ScenarioError::Submission { index, problem, .. } => {
                assert_eq!(index, 2);
                assert_eq!(
                    problem,
                    SubmissionProblem::TimeRegression { time: 50, previous: 100 }
                );
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_unknown_fault_label() {
        let text = format!("{WALKTHROUGH}\n[[faults]]\nkind = \"drop\"\nlabel = \"tx9\"\n");
        let err = Scenario::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::FaultLabel { index: 0, .. }));
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = WALKTHROUGH.replace("width = 3", "width = 3\nwobble = 1");
        assert!(matches!(Scenario::from_toml_str(&text), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn rejects_duplicate_account() {
        let text = WALKTHROUGH.replace("address = \"0xb0b\"", "address = \"0xa11ce\"");
        assert!(matches!(
            Scenario::from_toml_str(&text),
            Err(ScenarioError::DuplicateAccount { index: 1, .. })
        ));
    }

    #[test]
    fn fault_aggregation() {
        let mut s = Scenario::from_toml_str(WALKTHROUGH).unwrap();
        s.faults.push(Fault::Delay { label: "t1".into(), ms: 200 });
        s.faults.push(Fault::Delay { label: "t1".into(), ms: 300 });
        s.faults.push(Fault::Drop { label: "t2".into() });
        assert_eq!(s.fault_for(0), (false, 500));
        assert_eq!(s.fault_for(1), (true, 0));
        assert_eq!(s.fault_for(2), (false, 0));
    }

    #[test]
    fn config_precedence_defaults_then_scenario() {
        let text = format!("{WALKTHROUGH}\n[config]\nseed = 9\nhorizon_ms = 3000\n");
        let s = Scenario::from_toml_str(&text).unwrap();
        let config = SimConfig::for_scenario(Mode::Bvc, &s);
        assert_eq!(config.seed, 9);
        assert_eq!(config.horizon_ms, 3_000);
        assert_eq!(config.node_count, DEFAULT_NODE_COUNT);
        assert_eq!(config.block_interval_ms, DEFAULT_BLOCK_INTERVAL_MS);
    }

    #[test]
    fn config_validation() {
        let mut config = SimConfig::new(Mode::Bvc);
        config.latency_min_ms = 80;
        assert_eq!(
            config.validate(),
            Err(ConfigError::LatencyOrder { min: 80, max: DEFAULT_LATENCY_MAX_MS })
        );
        let mut config = SimConfig::new(Mode::Nonce);
        config.drop_probability = 1.5;
        assert!(matches!(config.validate(), Err(ConfigError::DropRange(_))));
        let mut config = SimConfig::new(Mode::Nonce);
        config.horizon_ms = 0;
        assert_eq!(config.validate(), Err(ConfigError::ZeroHorizon));
    }

    #[test]
    fn empty_scenario_is_valid() {
        let s = Scenario::from_toml_str("width = 8\n").unwrap();
        assert!(s.accounts.is_empty());
        assert!(s.submissions.is_empty());
        let text = s.to_toml_string();
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);
    }
}
