//! Deterministic discrete-event simulation of a small block-producing
//! network, plus the scenario files and workload generator that feed it.
//!
//! Everything is a pure function of (scenario, config): the event queue
//! orders by `(time, sequence)`, all randomness comes from one seeded
//! stream, and runs emit byte-identical traces and metrics for identical
//! inputs.

pub mod batch;
pub mod generate;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod trace;

pub use batch::{run_compare, run_seed_sweep, CompareOutput};
pub use generate::{generate, GenError, GenParams};
pub use metrics::{Aggregates, Metrics, TxRecord, TxStatus};
pub use scenario::{ConfigOverrides, Fault, Mode, Scenario, ScenarioError, SimConfig, Submission};
pub use sim::{run, ConfirmationRecord, ProbeEntry, RunOutput, SimError};
