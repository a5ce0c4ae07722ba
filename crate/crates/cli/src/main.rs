//! Command line front end for the ordering testbed.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad flags, scenario or
//! config errors), 1 for anything else that fails at runtime. Set
//! `BVC_LOG=debug` for diagnostics on stderr.

mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bvc_core::enumerate_lattice;
use bvc_sim::{
    generate, run, run_compare, ConfigOverrides, GenParams, Metrics, Mode, Scenario, SimConfig,
};
use report::{
    CompareReport, ConfigReport, DeltaReport, LatticeReport, RunReport, SideReport,
    SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(name = "bvc", version, about = "Transaction ordering testbed: bit clocks against account nonces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario in one ordering mode
    Run(RunArgs),
    /// Run both modes with identical faults and report the deltas
    Compare(CompareArgs),
    /// Enumerate a mask lattice and its comparability matrix
    Lattice(LatticeArgs),
    /// Generate a Pareto-skewed workload scenario
    Gen(GenArgs),
    /// Check that a scenario file parses and validates
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Bvc,
    Nonce,
}

impl From<CliMode> for Mode {
    fn from(mode: CliMode) -> Mode {
        match mode {
            CliMode::Bvc => Mode::Bvc,
            CliMode::Nonce => Mode::Nonce,
        }
    }
}

/// Config knobs; unset ones fall back to the scenario's `[config]` table,
/// then to the defaults.
#[derive(Args)]
struct Knobs {
    /// Seed for latencies and probabilistic drops
    #[arg(long)]
    seed: Option<u64>,
    /// Number of block-producing nodes
    #[arg(long)]
    nodes: Option<usize>,
    /// Block interval in milliseconds
    #[arg(long, value_name = "MS")]
    interval: Option<u64>,
    /// One-way delivery latency range, milliseconds
    #[arg(long, value_name = "MIN:MAX")]
    latency: Option<String>,
    /// Probability that a submission is lost
    #[arg(long, value_name = "P")]
    drop: Option<f64>,
    /// Transactions per block cap
    #[arg(long)]
    max_block_txs: Option<usize>,
    /// Simulated run length in milliseconds
    #[arg(long, value_name = "MS")]
    horizon: Option<u64>,
    /// Pool time-to-live in blocks
    #[arg(long, value_name = "BLOCKS")]
    ttl: Option<u64>,
}

impl Knobs {
    fn overrides(&self) -> Result<ConfigOverrides, UsageError> {
        let mut o = ConfigOverrides::default();
        o.seed = self.seed;
        o.node_count = self.nodes;
        o.block_interval_ms = self.interval;
        if let Some(text) = &self.latency {
            let (min, max) = parse_range(text)
                .ok_or_else(|| UsageError(format!("bad latency range {text:?}, want MIN:MAX")))?;
            o.latency_min_ms = Some(min);
            o.latency_max_ms = Some(max);
        }
        o.drop_probability = self.drop;
        o.max_block_txs = self.max_block_txs;
        o.horizon_ms = self.horizon;
        o.ttl_blocks = self.ttl;
        Ok(o)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario TOML file
    #[arg(long)]
    scenario: PathBuf,
    /// Ordering policy to simulate
    #[arg(long, value_enum)]
    mode: CliMode,
    #[command(flatten)]
    knobs: Knobs,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the event trace here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write per-transaction records here as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario TOML file
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    knobs: Knobs,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write traces to PREFIX.bvc.log and PREFIX.nonce.log
    #[arg(long, value_name = "PREFIX")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeArgs {
    /// Mask width to enumerate (1 to 10)
    #[arg(long)]
    width: u16,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of sender accounts
    #[arg(long, default_value_t = 10)]
    senders: usize,
    /// Total transactions across all senders
    #[arg(long, default_value_t = 100)]
    txs: usize,
    /// Pareto tail exponent for the per-sender split
    #[arg(long, default_value_t = 1.16)]
    alpha: f64,
    /// Probability that a transaction depends on its sender's previous one
    #[arg(long, default_value_t = 0.25)]
    dep: f64,
    /// Bit-array width the scenario declares
    #[arg(long, default_value_t = 8)]
    width: u16,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Transfer value range
    #[arg(long, value_name = "LO:HI", default_value = "1:100")]
    values: String,
    /// Fee range
    #[arg(long, value_name = "LO:HI", default_value = "1:10")]
    fees: String,
    /// Milliseconds between consecutive submissions
    #[arg(long, value_name = "MS", default_value_t = 50)]
    spacing: u64,
    /// Write the scenario TOML here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scenario TOML file
    #[arg(long)]
    scenario: PathBuf,
}

/// An input problem: reported on stderr, exit code 2.
struct UsageError(String);

fn parse_range(text: &str) -> Option<(u64, u64)> {
    let (lo, hi) = text.split_once(':')?;
    let lo = lo.trim().parse().ok()?;
    let hi = hi.trim().parse().ok()?;
    Some((lo, hi))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("BVC_LOG")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<UsageError> for Failure {
    fn from(err: UsageError) -> Self {
        Failure::Usage(err.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Runtime(err)
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Lattice(args) => cmd_lattice(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    Scenario::load(path)
        .map_err(|err| Failure::Usage(format!("scenario {}: {err}", path.display())))
}

fn resolve_config(scenario: &Scenario, mode: Mode, knobs: &Knobs) -> Result<SimConfig, Failure> {
    let mut config = SimConfig::for_scenario(mode, scenario);
    config.apply_overrides(&knobs.overrides()?);
    config.validate().map_err(|err| Failure::Usage(err.to_string()))?;
    Ok(config)
}

/// Writes via a temporary sibling and a rename, so readers never see a
/// half-written file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().context("output path has no file name")?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming over {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).context("serializing report")
}

fn csv_of(metrics: &Metrics) -> String {
    let mut text = String::from("label,id,sender,submit_ms,status,confirm_ms,confirm_block,confirm_step\n");
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in &metrics.per_tx {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            r.label,
            r.id,
            r.sender,
            r.submit_ms,
            r.status.code(),
            opt(r.confirm_ms),
            opt(r.confirm_block),
            opt(r.confirm_step),
        );
    }
    text
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let config = resolve_config(&scenario, args.mode.into(), &args.knobs)?;
    let output = run(&scenario, &config).map_err(|err| Failure::Usage(err.to_string()))?;
    if let Some(path) = &args.trace {
        write_atomic(path, output.trace.as_bytes()).map_err(Failure::Runtime)?;
    }
    if let Some(path) = &args.csv {
        write_atomic(path, csv_of(&output.metrics).as_bytes()).map_err(Failure::Runtime)?;
    }
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        scenario: args.scenario.display().to_string(),
        config: ConfigReport::from_config(&config),
        trace_hash: output.trace_hash_hex(),
        metrics: output.metrics,
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let base = resolve_config(&scenario, Mode::Bvc, &args.knobs)?;
    let compare =
        run_compare(&scenario, &base).map_err(|err| Failure::Usage(err.to_string()))?;
    if let Some(prefix) = &args.trace {
        let base_name = prefix.display().to_string();
        write_atomic(Path::new(&format!("{base_name}.bvc.log")), compare.bvc.trace.as_bytes())
            .map_err(Failure::Runtime)?;
        write_atomic(Path::new(&format!("{base_name}.nonce.log")), compare.nonce.trace.as_bytes())
            .map_err(Failure::Runtime)?;
    }
    let report = CompareReport {
        schema_version: SCHEMA_VERSION,
        scenario: args.scenario.display().to_string(),
        delta: DeltaReport::between(&compare.bvc.metrics, &compare.nonce.metrics),
        bvc: SideReport {
            config: ConfigReport::from_config(&compare.bvc.config),
            trace_hash: compare.bvc.trace_hash_hex(),
            metrics: compare.bvc.metrics,
        },
        nonce: SideReport {
            config: ConfigReport::from_config(&compare.nonce.config),
            trace_hash: compare.nonce.trace_hash_hex(),
            metrics: compare.nonce.metrics,
        },
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(())
}

fn cmd_lattice(args: LatticeArgs) -> Result<(), Failure> {
    let matrix =
        enumerate_lattice(args.width).map_err(|err| Failure::Usage(err.to_string()))?;
    let size = matrix.size();
    let masks = (0..size).map(|i| matrix.mask(i).to_string()).collect();
    let rows = (0..size)
        .map(|i| (0..size).map(|j| matrix.get(i, j).letter()).collect())
        .collect();
    let report = LatticeReport {
        schema_version: SCHEMA_VERSION,
        width: args.width,
        masks,
        incomparable_pairs: matrix.incomparable_pairs() as u64,
        matrix: rows,
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let parse = |text: &str, what: &str| -> Result<(u64, u64), Failure> {
        parse_range(text)
            .ok_or_else(|| Failure::Usage(format!("bad {what} range {text:?}, want LO:HI")))
    };
    let params = GenParams {
        senders: args.senders,
        total_txs: args.txs,
        alpha: args.alpha,
        dep_prob: args.dep,
        width: args.width,
        value_range: parse(&args.values, "value")?,
        fee_range: parse(&args.fees, "fee")?,
        interval_ms: args.spacing,
    };
    let scenario =
        generate(&params, args.seed).map_err(|err| Failure::Usage(err.to_string()))?;
    emit(args.out.as_deref(), scenario.to_toml_string().trim_end())?;
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    println!(
        "ok: width {}, {} accounts, {} submissions, {} faults",
        scenario.width,
        scenario.accounts.len(),
        scenario.submissions.len(),
        scenario.faults.len()
    );
    Ok(())
}
