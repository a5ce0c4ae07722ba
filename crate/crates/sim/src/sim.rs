//! The discrete-event simulator: a small network of honest nodes producing
//! blocks round-robin over a faulty transaction feed.
//!
//! Determinism: events process in `(time, sequence)` order, sequence being
//! assignment order; all randomness (latencies, probabilistic drops) comes
//! from one ChaCha stream seeded by the run seed; all iteration is over
//! ordered maps. Identical `(scenario, config)` give byte-identical traces.
//!
//! Topology is a clique. The producer of slot `s` (at time `s *
//! block_interval_ms`) is node `(s - 1) mod node_count`. A producer whose
//! chain is behind (deliveries still in flight) skips its slot, so the
//! chain never forks and every node applies the same blocks, possibly
//! buffered out of order. Node 0 is the observer: its pool is sampled for
//! occupancy and its evictions decide invalidated/expired statuses.
//!
//! Statuses are snapshotted at the horizon. After it, in-flight block
//! deliveries still drain (the settle phase) so that every node converges
//! to the canonical state, which the run output asserts by hash.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use bvc_core::{
    Address, Block, ClockState, EvictionReason, Ledger, Mempool, MempoolConfig, OrderingMode,
    Transaction, TxId, Wallet,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::metrics::{Metrics, TxRecord, TxStatus};
use crate::scenario::{ConfigError, Mode, Scenario, SimConfig};
use crate::trace::TraceBuilder;

/// Errors from starting a run.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("ledger setup: {0}")]
    Ledger(#[from] bvc_core::LedgerError),
}

/// One confirmed transaction on the canonical chain.
#[derive(Clone, PartialEq, Debug)]
pub struct ConfirmationRecord {
    pub submission: usize,
    pub label: String,
    pub id: TxId,
    pub block_height: u64,
    /// Global confirmation position, counting from 0.
    pub step: u64,
    pub time_ms: u64,
    /// Sender's clock right after the merge, in bit-clock mode.
    pub post_clock: Option<ClockState>,
}

/// When a submission first became applicable on the canonical state,
/// whatever its later fate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbeEntry {
    pub submission: usize,
    pub label: String,
    /// `(time_ms, canonical step count)` of first applicability.
    pub first_applicable: Option<(u64, u64)>,
}

/// Everything a run produces.
pub struct RunOutput {
    pub config: SimConfig,
    pub metrics: Metrics,
    pub trace: String,
    pub trace_hash: [u8; 32],
    pub final_ledger: Ledger,
    pub node_state_hashes: Vec<[u8; 32]>,
    pub confirmations: Vec<ConfirmationRecord>,
    pub probe: Vec<ProbeEntry>,
}

impl RunOutput {
    pub fn trace_hash_hex(&self) -> String {
        hex::encode(self.trace_hash)
    }

    pub fn status_of(&self, label: &str) -> Option<TxStatus> {
        self.metrics.status_of(label)
    }

    pub fn confirmation(&self, label: &str) -> Option<&ConfirmationRecord> {
        self.confirmations.iter().find(|c| c.label == label)
    }

    pub fn probe_of(&self, label: &str) -> Option<&ProbeEntry> {
        self.probe.iter().find(|p| p.label == label)
    }
}

#[derive(Debug)]
enum EventKind {
    Submit { submission: usize },
    TxDeliver { node: usize, submission: usize },
    BlockProduce { producer: usize },
    BlockDeliver { node: usize, block: usize },
}

#[derive(Debug)]
struct Event {
    time: u64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

struct Node {
    ledger: Ledger,
    pool: Mempool,
    /// Delivered blocks waiting for their predecessors, by height.
    buffered: BTreeMap<u64, usize>,
}

/// Deterministic address credited with the fees of a node's blocks.
pub fn producer_address(node: usize) -> Address {
    let mut hasher = Sha256::new();
    hasher.update(b"validator-");
    hasher.update((node as u64).to_be_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; bvc_core::ADDRESS_LEN];
    bytes.copy_from_slice(&digest[..bvc_core::ADDRESS_LEN]);
    Address::new(bytes)
}

fn probe_scan_against(
    ledger: &Ledger,
    issued: &[Option<Transaction>],
    confirm: &[Option<ConfirmationRecord>],
    probe_first: &mut [Option<(u64, u64)>],
    chain_steps: u64,
    time: u64,
) {
    for i in 0..issued.len() {
        if probe_first[i].is_some() || confirm[i].is_some() {
            continue;
        }
        let Some(tx) = &issued[i] else { continue };
        if ledger.validate(tx).is_ok() {
            probe_first[i] = Some((time, chain_steps));
        }
    }
}

struct Sim<'a> {
    scenario: &'a Scenario,
    config: SimConfig,
    nodes: Vec<Node>,
    canonical: Ledger,
    wallets: BTreeMap<Address, Wallet>,
    rng: ChaCha8Rng,
    trace: TraceBuilder,
    heap: BinaryHeap<Reverse<Event>>,
    seq: u64,
    chain: Vec<Block>,
    chain_steps: u64,
    issued: Vec<Option<Transaction>>,
    submit_time: Vec<Option<u64>>,
    dropped: Vec<bool>,
    confirm: Vec<Option<ConfirmationRecord>>,
    probe_first: Vec<Option<(u64, u64)>>,
    observer_evictions: BTreeMap<TxId, EvictionReason>,
    id_to_submission: BTreeMap<TxId, usize>,
    pool_samples: Vec<usize>,
}

/// Runs one simulation to completion.
pub fn run(scenario: &Scenario, config: &SimConfig) -> Result<RunOutput, SimError> {
    config.validate()?;
    let mode = match config.mode {
        Mode::Bvc => OrderingMode::Bvc { width: scenario.width },
        Mode::Nonce => OrderingMode::Nonce,
    };
    let genesis = Ledger::new(mode, &scenario.accounts)?;
    let pool_config = MempoolConfig::for_mode(mode).with_ttl(config.ttl_blocks);
    let nodes = (0..config.node_count)
        .map(|_| Node {
            ledger: genesis.clone(),
            pool: Mempool::new(pool_config),
            buffered: BTreeMap::new(),
        })
        .collect();
    let wallets = scenario
        .accounts
        .iter()
        .map(|(address, _)| {
            let wallet = match config.mode {
                Mode::Bvc => Wallet::new_bvc(*address, scenario.width)
                    .expect("scenario width validated"),
                Mode::Nonce => Wallet::new_nonce(*address),
            };
            (*address, wallet)
        })
        .collect();

    let n = scenario.submissions.len();
    let mut sim = Sim {
        scenario,
        config: *config,
        nodes,
        canonical: genesis,
        wallets,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        trace: TraceBuilder::new(),
        heap: BinaryHeap::new(),
        seq: 0,
        chain: Vec::new(),
        chain_steps: 0,
        issued: vec![None; n],
        submit_time: vec![None; n],
        dropped: vec![false; n],
        confirm: vec![None; n],
        probe_first: vec![None; n],
        observer_evictions: BTreeMap::new(),
        id_to_submission: BTreeMap::new(),
        pool_samples: Vec::new(),
    };
    Ok(sim.run())
}

impl<'a> Sim<'a> {
    fn schedule(&mut self, time: u64, kind: EventKind) {
        let seq = self.seq;
        self.seq += 1;
        self.heap.push(Reverse(Event { time, seq, kind }));
    }

    fn latency(&mut self) -> u64 {
        self.rng.random_range(self.config.latency_min_ms..=self.config.latency_max_ms)
    }

    fn run(&mut self) -> RunOutput {
        for (i, sub) in self.scenario.submissions.iter().enumerate() {
            if sub.time_ms <= self.config.horizon_ms {
                self.schedule(sub.time_ms, EventKind::Submit { submission: i });
            }
        }
        let mut slot = 1u64;
        loop {
            let time = slot.saturating_mul(self.config.block_interval_ms);
            if time > self.config.horizon_ms {
                break;
            }
            let producer = ((slot - 1) % self.config.node_count as u64) as usize;
            self.schedule(time, EventKind::BlockProduce { producer });
            slot += 1;
        }

        // Main phase: everything up to the horizon.
        while let Some(Reverse(event)) = self.heap.peek() {
            if event.time > self.config.horizon_ms {
                break;
            }
            let Reverse(event) = self.heap.pop().expect("peeked");
            self.dispatch(event);
        }

        // Statuses freeze at the horizon.
        let statuses = self.snapshot_statuses();
        self.trace.record(self.config.horizon_ms, None, "horizon", "", "");

        // Settle: drain in-flight block deliveries so every node converges;
        // everything else stops at the horizon.
        while let Some(Reverse(event)) = self.heap.pop() {
            match event.kind {
                EventKind::BlockDeliver { node, block } => {
                    self.on_block_deliver(node, block, event.time);
                }
                EventKind::Submit { .. }
                | EventKind::TxDeliver { .. }
                | EventKind::BlockProduce { .. } => {}
            }
        }

        self.finish(statuses)
    }

    fn dispatch(&mut self, event: Event) {
        match event.kind {
            EventKind::Submit { submission } => self.on_submit(submission, event.time),
            EventKind::TxDeliver { node, submission } => {
                self.on_tx_deliver(node, submission, event.time)
            }
            EventKind::BlockProduce { producer } => self.on_block_produce(producer, event.time),
            EventKind::BlockDeliver { node, block } => {
                self.on_block_deliver(node, block, event.time)
            }
        }
    }

    fn on_submit(&mut self, i: usize, time: u64) {
        let sub = &self.scenario.submissions[i];
        let dep_ids: Vec<TxId> = self
            .scenario
            .dep_indices(i)
            .into_iter()
            .map(|j| self.issued[j].as_ref().expect("deps submit earlier").id())
            .collect();
        let wallet = self.wallets.get_mut(&sub.sender).expect("declared account");
        let tx = wallet
            .issue(sub.recipient, sub.value, sub.fee, &dep_ids)
            .expect("deps were issued by this wallet");
        let id = tx.id();
        self.trace.record(time, None, "submit", &id.short(), &format!("label={}", sub.label));
        self.issued[i] = Some(tx);
        self.submit_time[i] = Some(time);
        self.id_to_submission.insert(id, i);
        self.probe_scan(time);

        let chance_drop = self.rng.random::<f64>() < self.config.drop_probability;
        let (fault_drop, fault_delay) = self.scenario.fault_for(i);
        if fault_drop || chance_drop {
            self.dropped[i] = true;
            let reason = if fault_drop { "fault" } else { "chance" };
            self.trace.record(time, None, "drop", &id.short(), &format!("reason={reason}"));
            return;
        }
        for node in 0..self.config.node_count {
            let latency = self.latency();
            self.schedule(
                time + fault_delay + latency,
                EventKind::TxDeliver { node, submission: i },
            );
        }
    }

    fn on_tx_deliver(&mut self, node: usize, i: usize, time: u64) {
        let tx = self.issued[i].as_ref().expect("submitted before delivery").clone();
        let id = tx.id().short();
        let node_state = &mut self.nodes[node];
        match node_state.pool.insert(&node_state.ledger, tx) {
            Ok(class) => {
                self.trace.record(time, Some(node), "deliver", &id, &format!("class={}", class.code()));
            }
            Err(err) => {
                let code = match err {
                    bvc_core::InsertError::Duplicate(_) => "duplicate".to_string(),
                    bvc_core::InsertError::Rejected(_, reason) => reason.code().to_string(),
                    bvc_core::InsertError::PoolFull(_, _) => "pool_full".to_string(),
                };
                self.trace.record(time, Some(node), "deliver", &id, &format!("reject={code}"));
            }
        }
    }

    fn on_block_produce(&mut self, producer: usize, time: u64) {
        self.pool_samples.push(self.nodes[0].pool.len());
        let height = self.chain.len() as u64;
        if self.nodes[producer].ledger.next_height() != height {
            self.trace.record(
                time,
                Some(producer),
                "skip",
                "",
                &format!("height={}", self.nodes[producer].ledger.next_height()),
            );
            return;
        }
        let address = producer_address(producer);
        let node = &mut self.nodes[producer];
        let txs = node.pool.select_for_block(&node.ledger, &address, self.config.max_block_txs);
        let block = Block::build(height, node.ledger.head(), address, txs);
        node.ledger.apply_block(&block).expect("selected against this ledger");
        let evictions = node.pool.on_block_applied(&node.ledger, &block);
        self.trace.record(
            time,
            Some(producer),
            "produce",
            &block.id().short(),
            &format!("height={height},txs={}", block.txs().len()),
        );

        // Canonical bookkeeping: confirmations, probe, wallet feedback.
        // Intermediate (mid-block) states live on a scratch copy; the real
        // canonical ledger advances by whole blocks.
        let mut scratch = self.canonical.clone();
        for tx in block.txs() {
            let i = self.id_to_submission[&tx.id()];
            if self.probe_first[i].is_none() {
                self.probe_first[i] = Some((time, self.chain_steps));
            }
            scratch.apply(tx, &address).expect("canonical mirrors the producer");
            let step = self.chain_steps;
            self.chain_steps += 1;
            let post_clock = match self.config.mode {
                Mode::Bvc => scratch.account(&tx.sender()).expect("sender exists").clock(),
                Mode::Nonce => None,
            };
            let label = self.scenario.submissions[i].label.clone();
            let info = match post_clock {
                Some(clock) => format!(
                    "height={height},step={step},clock={}:{}",
                    clock.epoch(),
                    clock.confirmed().digits()
                ),
                None => format!("height={height},step={step}"),
            };
            self.trace.record(time, Some(producer), "include", &tx.id().short(), &info);
            self.confirm[i] = Some(ConfirmationRecord {
                submission: i,
                label,
                id: tx.id(),
                block_height: height,
                step,
                time_ms: time,
                post_clock,
            });
            let wallet = self.wallets.get_mut(&tx.sender()).expect("declared account");
            wallet.on_confirmed(&tx.id(), post_clock);
            self.probe_scan_on(&scratch, time);
        }
        self.canonical.apply_block(&block).expect("canonical chain replays cleanly");
        self.record_evictions(producer, &evictions, time);
        let block_index = self.chain.len();
        self.chain.push(block);
        for node in 0..self.config.node_count {
            if node == producer {
                continue;
            }
            let latency = self.latency();
            self.schedule(time + latency, EventKind::BlockDeliver { node, block: block_index });
        }
    }

    fn on_block_deliver(&mut self, node: usize, block_index: usize, time: u64) {
        let height = self.chain[block_index].height();
        self.nodes[node].buffered.insert(height, block_index);
        if height != self.nodes[node].ledger.next_height() {
            self.trace.record(
                time,
                Some(node),
                "buffer",
                &self.chain[block_index].id().short(),
                &format!("height={height}"),
            );
        }
        loop {
            let next = self.nodes[node].ledger.next_height();
            let Some(index) = self.nodes[node].buffered.remove(&next) else { break };
            let block = self.chain[index].clone();
            let node_state = &mut self.nodes[node];
            node_state.ledger.apply_block(&block).expect("canonical chain replays cleanly");
            let evictions = node_state.pool.on_block_applied(&node_state.ledger, &block);
            self.trace.record(
                time,
                Some(node),
                "block",
                &block.id().short(),
                &format!("height={}", block.height()),
            );
            self.record_evictions(node, &evictions, time);
        }
    }

    fn record_evictions(&mut self, node: usize, evictions: &[bvc_core::EvictionRecord], time: u64) {
        for record in evictions {
            self.trace.record(
                time,
                Some(node),
                "evict",
                &record.id.short(),
                &format!("reason={}", record.reason.code()),
            );
            if node == 0 && record.reason != EvictionReason::Confirmed {
                self.observer_evictions.insert(record.id, record.reason);
                if let Some(i) = self.id_to_submission.get(&record.id) {
                    let sender = self.scenario.submissions[*i].sender;
                    if let Some(wallet) = self.wallets.get_mut(&sender) {
                        wallet.on_invalidated(&record.id);
                    }
                }
            }
        }
    }

    /// Marks the first time each issued, unconfirmed submission validates
    /// against the canonical state. Called whenever that state (or the set
    /// of issued transactions) changes.
    fn probe_scan(&mut self, time: u64) {
        probe_scan_against(
            &self.canonical,
            &self.issued,
            &self.confirm,
            &mut self.probe_first,
            self.chain_steps,
            time,
        );
    }

    fn probe_scan_on(&mut self, ledger: &Ledger, time: u64) {
        probe_scan_against(
            ledger,
            &self.issued,
            &self.confirm,
            &mut self.probe_first,
            self.chain_steps,
            time,
        );
    }

    fn snapshot_statuses(&self) -> Vec<Option<TxStatus>> {
        (0..self.issued.len())
            .map(|i| {
                self.submit_time[i]?;
                let id = self.issued[i].as_ref().expect("issued when submitted").id();
                Some(if self.confirm[i].is_some() {
                    TxStatus::Confirmed
                } else if self.dropped[i] {
                    TxStatus::Dropped
                } else {
                    match self.observer_evictions.get(&id) {
                        Some(EvictionReason::Invalidated) => TxStatus::Invalidated,
                        Some(EvictionReason::Expired) => TxStatus::Expired,
                        _ => TxStatus::Stalled,
                    }
                })
            })
            .collect()
    }

    fn finish(&mut self, statuses: Vec<Option<TxStatus>>) -> RunOutput {
        let per_tx: Vec<TxRecord> = (0..self.issued.len())
            .filter_map(|i| {
                let status = statuses[i]?;
                let tx = self.issued[i].as_ref().expect("issued when submitted");
                let confirmation = self.confirm[i].as_ref();
                Some(TxRecord {
                    label: self.scenario.submissions[i].label.clone(),
                    id: tx.id().to_string(),
                    sender: tx.sender().to_string(),
                    submit_ms: self.submit_time[i].expect("status implies submitted"),
                    status,
                    confirm_ms: confirmation.map(|c| c.time_ms),
                    confirm_block: confirmation.map(|c| c.block_height),
                    confirm_step: confirmation.map(|c| c.step),
                })
            })
            .collect();
        let metrics =
            Metrics::from_records(per_tx, self.chain.len() as u64, &self.pool_samples);
        let confirmations: Vec<ConfirmationRecord> = {
            let mut list: Vec<ConfirmationRecord> =
                self.confirm.iter().flatten().cloned().collect();
            list.sort_by_key(|c| c.step);
            list
        };
        let probe: Vec<ProbeEntry> = (0..self.issued.len())
            .map(|i| ProbeEntry {
                submission: i,
                label: self.scenario.submissions[i].label.clone(),
                first_applicable: self.probe_first[i],
            })
            .collect();
        let node_state_hashes: Vec<[u8; 32]> =
            self.nodes.iter().map(|n| n.ledger.state_hash()).collect();
        debug_assert!(
            node_state_hashes.iter().all(|h| *h == self.canonical.state_hash()),
            "settle phase must converge every node"
        );
        let trace = std::mem::take(&mut self.trace);
        let (trace, trace_hash) = trace.finish();
        RunOutput {
            config: self.config,
            metrics,
            trace,
            trace_hash,
            final_ledger: self.canonical.clone(),
            node_state_hashes,
            confirmations,
            probe,
        }
    }
}
