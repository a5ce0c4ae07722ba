//! Pending-transaction pool. Entries carry a readiness class that is
//! recomputed against the ledger after every applied block, so a
//! transaction only moves forward: waiting, then ready, then confirmed, or
//! out via invalidation or expiry.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ledger::{Block, Ledger, OrderingMode, RejectReason};
use crate::tx::{Address, Transaction, TxId};

/// Pool knobs. [`MempoolConfig::for_mode`] gives the defaults: entries live
/// 32 blocks, and one sender may hold at most `4 * k` pending bit-clock
/// transactions or 256 nonce ones.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MempoolConfig {
    pub ttl_blocks: u64,
    pub per_sender_cap: usize,
}

/// Default time-to-live, in blocks.
pub const DEFAULT_TTL_BLOCKS: u64 = 32;

impl MempoolConfig {
    pub fn for_mode(mode: OrderingMode) -> Self {
        let per_sender_cap = match mode {
            OrderingMode::Nonce => 256,
            OrderingMode::Bvc { width } => 4 * usize::from(width),
        };
        Self { ttl_blocks: DEFAULT_TTL_BLOCKS, per_sender_cap }
    }

    pub fn with_ttl(mut self, ttl_blocks: u64) -> Self {
        self.ttl_blocks = ttl_blocks;
        self
    }
}

/// Readiness of a pending transaction against the current ledger.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TxClass {
    /// Applicable right now.
    Ready,
    /// Ordering prerequisites missing: nonce gap or unconfirmed bits.
    WaitingOrdering,
    /// Epoch ahead of the account; waits for the current epoch to fill.
    WaitingEpoch,
    /// Balance too low, or the sender account does not exist yet.
    WaitingFunds,
}

impl TxClass {
    /// Stable snake_case code used in traces.
    pub fn code(&self) -> &'static str {
        match self {
            TxClass::Ready => "ready",
            TxClass::WaitingOrdering => "waiting_ordering",
            TxClass::WaitingEpoch => "waiting_epoch",
            TxClass::WaitingFunds => "waiting_funds",
        }
    }
}

/// Why an insertion was refused.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InsertError {
    #[error("transaction {0:?} already pending")]
    Duplicate(TxId),
    #[error("transaction {0:?} rejected: {1}")]
    Rejected(TxId, RejectReason),
    #[error("sender {0} at per-sender cap {1}")]
    PoolFull(Address, usize),
}

/// Why an entry left the pool on a block boundary.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EvictionReason {
    /// Included in the applied block.
    Confirmed,
    /// Permanently dead against the new state: its ordering slot was
    /// consumed by a different transaction, or it became malformed.
    Invalidated,
    /// Outlived the pool TTL.
    Expired,
}

impl EvictionReason {
    pub fn code(&self) -> &'static str {
        match self {
            EvictionReason::Confirmed => "confirmed",
            EvictionReason::Invalidated => "invalidated",
            EvictionReason::Expired => "expired",
        }
    }
}

/// One pool departure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvictionRecord {
    pub id: TxId,
    pub sender: Address,
    pub reason: EvictionReason,
}

#[derive(Clone, Debug)]
struct Entry {
    tx: Transaction,
    class: TxClass,
    inserted_at: u64,
}

/// The pool itself. Iteration orders are those of the underlying B-tree
/// maps, so behavior is deterministic for identical inputs.
#[derive(Clone, Debug)]
pub struct Mempool {
    config: MempoolConfig,
    entries: BTreeMap<TxId, Entry>,
    by_sender: BTreeMap<Address, BTreeSet<TxId>>,
}

fn classify(ledger: &Ledger, tx: &Transaction) -> Result<TxClass, RejectReason> {
    match ledger.validate(tx) {
        Ok(()) => Ok(TxClass::Ready),
        Err(RejectReason::OrderingNotReady) => Ok(TxClass::WaitingOrdering),
        Err(RejectReason::FutureEpoch) => Ok(TxClass::WaitingEpoch),
        Err(RejectReason::InsufficientBalance) | Err(RejectReason::UnknownAccount) => {
            Ok(TxClass::WaitingFunds)
        }
        Err(reason @ (RejectReason::Replay | RejectReason::Malformed)) => Err(reason),
    }
}

impl Mempool {
    pub fn new(config: MempoolConfig) -> Self {
        Self { config, entries: BTreeMap::new(), by_sender: BTreeMap::new() }
    }

    pub fn config(&self) -> MempoolConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &TxId) -> bool {
        self.entries.contains_key(id)
    }

    pub fn class_of(&self, id: &TxId) -> Option<TxClass> {
        self.entries.get(id).map(|e| e.class)
    }

    pub fn pending_of(&self, sender: &Address) -> usize {
        self.by_sender.get(sender).map_or(0, |set| set.len())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TxId, &Transaction, TxClass)> {
        self.entries.iter().map(|(id, e)| (id, &e.tx, e.class))
    }

    /// Admits a transaction, classifying it against `ledger`. Duplicates,
    /// replays, malformed transactions, and senders at their cap are
    /// refused; everything else is admitted with its class.
    pub fn insert(&mut self, ledger: &Ledger, tx: Transaction) -> Result<TxClass, InsertError> {
        let id = tx.id();
        if self.entries.contains_key(&id) {
            return Err(InsertError::Duplicate(id));
        }
        let class = classify(ledger, &tx).map_err(|reason| InsertError::Rejected(id, reason))?;
        let sender = tx.sender();
        let held = self.pending_of(&sender);
        if held >= self.config.per_sender_cap {
            return Err(InsertError::PoolFull(sender, self.config.per_sender_cap));
        }
        self.by_sender.entry(sender).or_default().insert(id);
        self.entries.insert(id, Entry { tx, class, inserted_at: ledger.next_height() });
        Ok(class)
    }

    /// Picks up to `limit` transactions for the next block, greedily by
    /// highest fee with ascending-id tie-break, each validated against a
    /// staged copy of the ledger so in-block dependencies chain correctly.
    /// Fees are staged to `producer`, matching how the block will apply.
    pub fn select_for_block(
        &self,
        ledger: &Ledger,
        producer: &Address,
        limit: usize,
    ) -> Vec<Transaction> {
        let mut staged = ledger.clone();
        let mut chosen: Vec<Transaction> = Vec::new();
        let mut taken: BTreeSet<TxId> = BTreeSet::new();
        while chosen.len() < limit {
            let mut best: Option<&Entry> = None;
            for (id, entry) in &self.entries {
                if taken.contains(id) || staged.validate(&entry.tx).is_err() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(cur) => {
                        let cur_key = (cur.tx.fee(), std::cmp::Reverse(cur.tx.id()));
                        let new_key = (entry.tx.fee(), std::cmp::Reverse(*id));
                        new_key > cur_key
                    }
                };
                if better {
                    best = Some(entry);
                }
            }
            let Some(entry) = best else { break };
            staged.apply(&entry.tx, producer).expect("validated against staged ledger");
            taken.insert(entry.tx.id());
            chosen.push(entry.tx.clone());
        }
        chosen
    }

    /// Reconciles the pool with a block the ledger just applied: drops the
    /// block's transactions as confirmed, reclassifies the rest against the
    /// new state, evicting the permanently dead and the expired. `ledger`
    /// must already reflect the block.
    pub fn on_block_applied(&mut self, ledger: &Ledger, block: &Block) -> Vec<EvictionRecord> {
        let mut evicted = Vec::new();
        for tx in block.txs() {
            let id = tx.id();
            if let Some(entry) = self.entries.remove(&id) {
                self.unindex(&entry.tx.sender(), &id);
                evicted.push(EvictionRecord {
                    id,
                    sender: entry.tx.sender(),
                    reason: EvictionReason::Confirmed,
                });
            }
        }
        let ids: Vec<TxId> = self.entries.keys().copied().collect();
        for id in ids {
            let entry = self.entries.get(&id).expect("still present");
            match classify(ledger, &entry.tx) {
                Err(_) => {
                    let sender = entry.tx.sender();
                    self.entries.remove(&id);
                    self.unindex(&sender, &id);
                    evicted.push(EvictionRecord { id, sender, reason: EvictionReason::Invalidated });
                }
                Ok(class) => {
                    let age = ledger.next_height().saturating_sub(entry.inserted_at);
                    if age > self.config.ttl_blocks {
                        let sender = entry.tx.sender();
                        self.entries.remove(&id);
                        self.unindex(&sender, &id);
                        evicted.push(EvictionRecord { id, sender, reason: EvictionReason::Expired });
                    } else {
                        self.entries.get_mut(&id).expect("still present").class = class;
                    }
                }
            }
        }
        evicted
    }

    fn unindex(&mut self, sender: &Address, id: &TxId) {
        if let Some(set) = self.by_sender.get_mut(sender) {
            set.remove(id);
            if set.is_empty() {
                self.by_sender.remove(sender);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::Timestamp;
    use crate::ledger::BlockId;
    use crate::mask::BitMask;
    use crate::tx::{OrderingTag, ADDRESS_LEN};

    fn addr(byte: u8) -> Address {
        Address::new([byte; ADDRESS_LEN])
    }

    fn ledger() -> Ledger {
        Ledger::new(OrderingMode::Bvc { width: 3 }, &[(addr(0x01), 100), (addr(0x02), 100)])
            .unwrap()
    }

    fn pool(ledger: &Ledger) -> Mempool {
        Mempool::new(MempoolConfig::for_mode(ledger.mode()))
    }

    fn tx(sender: Address, bits: u64, fee: u64) -> Transaction {
        let ts = Timestamp::new(0, BitMask::from_value(3, bits).unwrap());
        Transaction::new(sender, addr(0x03), 1, fee, OrderingTag::Bvc(ts))
    }

    #[test]
    fn insert_classifies() {
        let ledger = ledger();
        let mut pool = pool(&ledger);
        assert_eq!(pool.insert(&ledger, tx(addr(0x01), 0b001, 1)), Ok(TxClass::Ready));
        assert_eq!(
            pool.insert(&ledger, tx(addr(0x01), 0b011, 1)),
            Ok(TxClass::WaitingOrdering)
        );
        let future = Transaction::new(
            addr(0x01),
            addr(0x03),
            1,
            1,
            OrderingTag::Bvc(Timestamp::new(1, BitMask::from_value(3, 0b001).unwrap())),
        );
        assert_eq!(pool.insert(&ledger, future), Ok(TxClass::WaitingEpoch));
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn insert_refuses_duplicates_and_replays() {
        let mut ledger = ledger();
        let mut pool = pool(&ledger);
        let t = tx(addr(0x01), 0b001, 1);
        pool.insert(&ledger, t.clone()).unwrap();
        assert_eq!(pool.insert(&ledger, t.clone()), Err(InsertError::Duplicate(t.id())));

        ledger.apply(&t, &addr(0x0f)).unwrap();
        let mut fresh = Mempool::new(MempoolConfig::for_mode(ledger.mode()));
        assert_eq!(
            fresh.insert(&ledger, t.clone()),
            Err(InsertError::Rejected(t.id(), RejectReason::Replay))
        );
    }

    #[test]
    fn unknown_sender_waits_for_funds() {
        let ledger = ledger();
        let mut pool = pool(&ledger);
        assert_eq!(pool.insert(&ledger, tx(addr(0x09), 0b001, 1)), Ok(TxClass::WaitingFunds));
    }

    #[test]
    fn per_sender_cap() {
        let ledger = ledger();
        let mut pool = Mempool::new(MempoolConfig::for_mode(ledger.mode()));
        // Width 3 means a cap of 12; fee differentiates the ids.
        for fee in 0..12 {
            pool.insert(&ledger, tx(addr(0x01), 0b001, fee)).unwrap();
        }
        assert_eq!(
            pool.insert(&ledger, tx(addr(0x01), 0b001, 99)),
            Err(InsertError::PoolFull(addr(0x01), 12))
        );
        // Another sender is unaffected.
        assert!(pool.insert(&ledger, tx(addr(0x02), 0b001, 1)).is_ok());
    }

    #[test]
    fn select_prefers_fee_then_ascending_id() {
        let ledger = ledger();
        let mut pool = pool(&ledger);
        let low = tx(addr(0x01), 0b001, 1);
        let high = tx(addr(0x02), 0b001, 9);
        pool.insert(&ledger, low.clone()).unwrap();
        pool.insert(&ledger, high.clone()).unwrap();
        let picked = pool.select_for_block(&ledger, &addr(0x0f), 10);
        assert_eq!(picked[0].id(), high.id());
        assert_eq!(picked[1].id(), low.id());

        // Equal fees: ascending id decides.
        let a = tx(addr(0x01), 0b010, 5);
        let b = tx(addr(0x02), 0b010, 5);
        let mut pool2 = Mempool::new(MempoolConfig::for_mode(ledger.mode()));
        pool2.insert(&ledger, a.clone()).unwrap();
        pool2.insert(&ledger, b.clone()).unwrap();
        let picked = pool2.select_for_block(&ledger, &addr(0x0f), 10);
        let (first, second) = if a.id() < b.id() { (a, b) } else { (b, a) };
        assert_eq!(picked[0].id(), first.id());
        assert_eq!(picked[1].id(), second.id());
    }

    #[test]
    fn select_chains_in_block_dependencies() {
        let ledger = ledger();
        let mut pool = pool(&ledger);
        let dep = tx(addr(0x01), 0b001, 1);
        let dependent = tx(addr(0x01), 0b011, 9);
        pool.insert(&ledger, dep.clone()).unwrap();
        pool.insert(&ledger, dependent.clone()).unwrap();
        // The dependent has the higher fee but only becomes valid after the
        // dependency applies to the staged ledger.
        let picked = pool.select_for_block(&ledger, &addr(0x0f), 10);
        assert_eq!(picked.len(), 2);
        assert_eq!(picked[0].id(), dep.id());
        assert_eq!(picked[1].id(), dependent.id());
    }

    #[test]
    fn select_respects_limit_and_skips_waiting() {
        let ledger = ledger();
        let mut pool = pool(&ledger);
        for (sender, fee) in [(0x01u8, 3), (0x02, 2)] {
            pool.insert(&ledger, tx(addr(sender), 0b001, fee)).unwrap();
        }
        pool.insert(&ledger, tx(addr(0x01), 0b110, 9)).unwrap();
        let picked = pool.select_for_block(&ledger, &addr(0x0f), 1);
        assert_eq!(picked.len(), 1);
        assert_eq!(picked[0].fee(), 3);
        // The waiting tx is never picked even with the top fee.
        let picked = pool.select_for_block(&ledger, &addr(0x0f), 10);
        assert_eq!(picked.len(), 2);
    }

    #[test]
    fn block_confirms_reclassifies_and_invalidates() {
        let mut ledger = ledger();
        let mut pool = pool(&ledger);
        let dep = tx(addr(0x01), 0b001, 1);
        let dependent = tx(addr(0x01), 0b011, 1);
        // Same bit as dep, different fee: loses the slot once dep confirms.
        let rival = tx(addr(0x01), 0b001, 5);
        pool.insert(&ledger, dep.clone()).unwrap();
        pool.insert(&ledger, dependent.clone()).unwrap();
        pool.insert(&ledger, rival.clone()).unwrap();
        assert_eq!(pool.class_of(&dependent.id()), Some(TxClass::WaitingOrdering));

        let block = Block::build(0, BlockId::genesis(), addr(0x0f), vec![dep.clone()]);
        ledger.apply_block(&block).unwrap();
        let evicted = pool.on_block_applied(&ledger, &block);

        let confirmed: Vec<_> =
            evicted.iter().filter(|e| e.reason == EvictionReason::Confirmed).collect();
        assert_eq!(confirmed.len(), 1);
        assert_eq!(confirmed[0].id, dep.id());
        let invalidated: Vec<_> =
            evicted.iter().filter(|e| e.reason == EvictionReason::Invalidated).collect();
        assert_eq!(invalidated.len(), 1);
        assert_eq!(invalidated[0].id, rival.id());
        // The dependent moved forward to ready.
        assert_eq!(pool.class_of(&dependent.id()), Some(TxClass::Ready));
        assert_eq!(pool.len(), 1);
    }

    #[test]
    fn entries_expire_after_ttl() {
        let mut ledger = ledger();
        let config = MempoolConfig::for_mode(ledger.mode()).with_ttl(2);
        let mut pool = Mempool::new(config);
        // Waits forever: dependency bit 1 never confirms.
        let waiting = tx(addr(0x01), 0b110, 1);
        pool.insert(&ledger, waiting.clone()).unwrap();

        let mut expired = Vec::new();
        for _ in 0..3 {
            let block =
                Block::build(ledger.next_height(), ledger.head(), addr(0x0f), vec![]);
            ledger.apply_block(&block).unwrap();
            expired.extend(pool.on_block_applied(&ledger, &block));
        }
        assert_eq!(expired.len(), 1);
        assert_eq!(expired[0].reason, EvictionReason::Expired);
        assert_eq!(expired[0].id, waiting.id());
        assert!(pool.is_empty());
    }

    #[test]
    fn funds_arriving_moves_waiting_funds_forward() {
        let mut ledger = ledger();
        let mut pool = pool(&ledger);
        let poor = Transaction::new(
            addr(0x09),
            addr(0x01),
            1,
            0,
            OrderingTag::Bvc(Timestamp::new(0, BitMask::from_value(3, 0b001).unwrap())),
        );
        assert_eq!(pool.insert(&ledger, poor.clone()), Ok(TxClass::WaitingFunds));

        // A transfer funds the new account.
        let fund = tx(addr(0x01), 0b001, 1);
        let fund = Transaction::new(
            fund.sender(),
            addr(0x09),
            10,
            1,
            *fund.tag(),
        );
        let block = Block::build(0, BlockId::genesis(), addr(0x0f), vec![fund]);
        ledger.apply_block(&block).unwrap();
        let evicted = pool.on_block_applied(&ledger, &block);
        assert!(evicted.iter().all(|e| e.reason == EvictionReason::Confirmed));
        assert_eq!(pool.class_of(&poor.id()), Some(TxClass::Ready));
    }
}
