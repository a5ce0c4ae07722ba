//! The account ledger: balances plus one ordering state per account, either
//! a nonce counter or a bit clock, advanced by applying transactions one at
//! a time or atomically as blocks.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clock::{ClockError, ClockState, ConfirmDecision};
use crate::tx::{Address, OrderingTag, Transaction, TxId};

/// Which ordering policy the whole ledger runs under.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrderingMode {
    Nonce,
    Bvc { width: u16 },
}

impl OrderingMode {
    pub fn width(&self) -> Option<u16> {
        match self {
            OrderingMode::Nonce => None,
            OrderingMode::Bvc { width } => Some(*width),
        }
    }
}

/// Per-account ordering state.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AccountOrdering {
    Counter(u64),
    Clock(ClockState),
}

/// One account: spendable balance and ordering state.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Account {
    balance: u64,
    ordering: AccountOrdering,
}

impl Account {
    pub fn balance(&self) -> u64 {
        self.balance
    }

    pub fn ordering(&self) -> &AccountOrdering {
        &self.ordering
    }

    /// The clock state, when the account orders by bit clock.
    pub fn clock(&self) -> Option<ClockState> {
        match self.ordering {
            AccountOrdering::Clock(state) => Some(state),
            AccountOrdering::Counter(_) => None,
        }
    }

    /// The nonce counter, when the account orders by nonce.
    pub fn counter(&self) -> Option<u64> {
        match self.ordering {
            AccountOrdering::Counter(n) => Some(n),
            AccountOrdering::Clock(_) => None,
        }
    }
}

/// Why a transaction is not (yet) applicable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RejectReason {
    /// Ordering prerequisites have not landed: a nonce gap or unconfirmed
    /// dependency bits.
    #[error("ordering not ready")]
    OrderingNotReady,
    /// The ordering slot was already consumed.
    #[error("replay")]
    Replay,
    /// The timestamp's epoch is ahead of the account's.
    #[error("future epoch")]
    FutureEpoch,
    #[error("insufficient balance")]
    InsufficientBalance,
    /// Structurally unusable here: bad auth stub, tag kind or width not
    /// matching the ledger mode, or an empty mask.
    #[error("malformed")]
    Malformed,
    /// The sender has no account.
    #[error("unknown account")]
    UnknownAccount,
}

impl RejectReason {
    /// Stable snake_case code used in traces and reports.
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::OrderingNotReady => "ordering_not_ready",
            RejectReason::Replay => "replay",
            RejectReason::FutureEpoch => "future_epoch",
            RejectReason::InsufficientBalance => "insufficient_balance",
            RejectReason::Malformed => "malformed",
            RejectReason::UnknownAccount => "unknown_account",
        }
    }
}

/// Content-derived block id.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId([u8; 32]);

impl BlockId {
    /// The parent id of the first block.
    pub fn genesis() -> Self {
        Self([0; 32])
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// First 16 hex digits, the form used in traces.
    pub fn short(&self) -> String {
        hex::encode(&self.0[..8])
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", hex::encode(self.0))
    }
}

impl fmt::Debug for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

/// An ordered batch of transactions extending the chain at `height`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Block {
    height: u64,
    parent: BlockId,
    producer: Address,
    txs: Vec<Transaction>,
    id: BlockId,
}

impl Block {
    pub fn build(height: u64, parent: BlockId, producer: Address, txs: Vec<Transaction>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(b"block-v1");
        hasher.update(height.to_be_bytes());
        hasher.update(parent.0);
        hasher.update(producer.as_bytes());
        hasher.update((txs.len() as u64).to_be_bytes());
        for tx in &txs {
            hasher.update(tx.id().as_bytes());
        }
        let id = BlockId(hasher.finalize().into());
        Self { height, parent, producer, txs, id }
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn parent(&self) -> BlockId {
        self.parent
    }

    pub fn producer(&self) -> Address {
        self.producer
    }

    pub fn txs(&self) -> &[Transaction] {
        &self.txs
    }

    pub fn id(&self) -> BlockId {
        self.id
    }
}

/// Errors from constructing a ledger.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error("duplicate genesis account {0}")]
    DuplicateGenesisAccount(Address),
}

/// Errors from applying a block.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("block height {got} does not extend chain height {expected}")]
    HeightMismatch { got: u64, expected: u64 },
    #[error("block parent {got} does not match head {expected}")]
    ParentMismatch { got: BlockId, expected: BlockId },
    #[error("transaction {index} ({id:?}) rejected: {reason}")]
    RejectedTx { index: usize, id: TxId, reason: RejectReason },
}

/// The replicated state machine: accounts, chain height, and head id.
///
/// Recipients and producers gain accounts implicitly when first credited;
/// senders must already exist.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ledger {
    mode: OrderingMode,
    accounts: BTreeMap<Address, Account>,
    next_height: u64,
    head: BlockId,
}

impl Ledger {
    pub fn new(mode: OrderingMode, genesis: &[(Address, u64)]) -> Result<Self, LedgerError> {
        // Probe the width once so a bad mode fails here, not mid-run.
        if let OrderingMode::Bvc { width } = mode {
            ClockState::new(width)?;
        }
        let mut accounts = BTreeMap::new();
        for (address, balance) in genesis {
            let account = Account { balance: *balance, ordering: Self::fresh_ordering(mode) };
            if accounts.insert(*address, account).is_some() {
                return Err(LedgerError::DuplicateGenesisAccount(*address));
            }
        }
        Ok(Self { mode, accounts, next_height: 0, head: BlockId::genesis() })
    }

    fn fresh_ordering(mode: OrderingMode) -> AccountOrdering {
        match mode {
            OrderingMode::Nonce => AccountOrdering::Counter(0),
            OrderingMode::Bvc { width } => AccountOrdering::Clock(
                ClockState::new(width).expect("width validated at construction"),
            ),
        }
    }

    pub fn mode(&self) -> OrderingMode {
        self.mode
    }

    pub fn account(&self, address: &Address) -> Option<&Account> {
        self.accounts.get(address)
    }

    pub fn accounts(&self) -> impl Iterator<Item = (&Address, &Account)> {
        self.accounts.iter()
    }

    /// Height the next block must carry; equals the number of applied blocks.
    pub fn next_height(&self) -> u64 {
        self.next_height
    }

    pub fn head(&self) -> BlockId {
        self.head
    }

    /// Checks a transaction without mutating anything. Check order is fixed:
    /// malformed, unknown sender, ordering, then balance, so the reported
    /// reason is deterministic.
    pub fn validate(&self, tx: &Transaction) -> Result<(), RejectReason> {
        if !tx.auth_ok() {
            return Err(RejectReason::Malformed);
        }
        let account = match (self.mode, tx.tag()) {
            (OrderingMode::Nonce, OrderingTag::Nonce(_)) => {
                self.accounts.get(&tx.sender()).ok_or(RejectReason::UnknownAccount)?
            }
            (OrderingMode::Bvc { width }, OrderingTag::Bvc(ts)) => {
                if ts.width() != width || ts.validate().is_err() {
                    return Err(RejectReason::Malformed);
                }
                self.accounts.get(&tx.sender()).ok_or(RejectReason::UnknownAccount)?
            }
            _ => return Err(RejectReason::Malformed),
        };
        match (account.ordering, tx.tag()) {
            (AccountOrdering::Counter(counter), OrderingTag::Nonce(n)) => {
                if *n > counter {
                    return Err(RejectReason::OrderingNotReady);
                }
                if *n < counter {
                    return Err(RejectReason::Replay);
                }
            }
            (AccountOrdering::Clock(clock), OrderingTag::Bvc(ts)) => {
                let decision =
                    clock.confirmability(ts).map_err(|_| RejectReason::Malformed)?;
                match decision {
                    ConfirmDecision::Confirmable { .. } => {}
                    ConfirmDecision::MissingDependencies { .. } => {
                        return Err(RejectReason::OrderingNotReady)
                    }
                    ConfirmDecision::FutureEpoch => return Err(RejectReason::FutureEpoch),
                    ConfirmDecision::PastEpoch | ConfirmDecision::AlreadyCovered => {
                        return Err(RejectReason::Replay)
                    }
                }
            }
            _ => unreachable!("tag kind matched against mode above"),
        }
        let spend = u128::from(tx.value()) + u128::from(tx.fee());
        if spend > u128::from(account.balance) {
            return Err(RejectReason::InsufficientBalance);
        }
        Ok(())
    }

    /// Validates and applies one transaction: debits the sender, advances
    /// its ordering state, credits the recipient, and credits the fee to
    /// `producer`. Credited accounts come into existence as needed.
    pub fn apply(&mut self, tx: &Transaction, producer: &Address) -> Result<(), RejectReason> {
        self.validate(tx)?;
        {
            let account = self.accounts.get_mut(&tx.sender()).expect("validated");
            account.balance -= tx.value();
            account.balance -= tx.fee();
            account.ordering = match (account.ordering, tx.tag()) {
                (AccountOrdering::Counter(counter), OrderingTag::Nonce(_)) => {
                    AccountOrdering::Counter(counter + 1)
                }
                (AccountOrdering::Clock(clock), OrderingTag::Bvc(ts)) => {
                    AccountOrdering::Clock(clock.merge(ts).expect("validated"))
                }
                _ => unreachable!("validated"),
            };
        }
        self.credit(&tx.recipient(), tx.value());
        self.credit(producer, tx.fee());
        Ok(())
    }

    fn credit(&mut self, address: &Address, amount: u64) {
        let mode = self.mode;
        let account = self
            .accounts
            .entry(*address)
            .or_insert_with(|| Account { balance: 0, ordering: Self::fresh_ordering(mode) });
        account.balance = account.balance.checked_add(amount).expect("balance overflow");
    }

    /// Applies a block atomically: on any rejected transaction the ledger is
    /// left exactly as it was.
    pub fn apply_block(&mut self, block: &Block) -> Result<(), BlockError> {
        if block.height() != self.next_height {
            return Err(BlockError::HeightMismatch {
                got: block.height(),
                expected: self.next_height,
            });
        }
        if block.parent() != self.head {
            return Err(BlockError::ParentMismatch { got: block.parent(), expected: self.head });
        }
        let mut staged = self.clone();
        let producer = block.producer();
        for (index, tx) in block.txs().iter().enumerate() {
            staged.apply(tx, &producer).map_err(|reason| BlockError::RejectedTx {
                index,
                id: tx.id(),
                reason,
            })?;
        }
        staged.next_height += 1;
        staged.head = block.id();
        *self = staged;
        Ok(())
    }

    /// Nonce-mode diagnosis: which of the pending nonce-tagged transactions
    /// cannot process even after every processable one does. Walks each
    /// sender's counter through the pending nonce set; whatever the walk
    /// never reaches is stalled behind a gap. Order follows the input.
    pub fn nonce_gap_stalled(&self, pending: &[Transaction]) -> Vec<TxId> {
        let mut nonces: BTreeMap<Address, std::collections::BTreeSet<u64>> = BTreeMap::new();
        for tx in pending {
            if let OrderingTag::Nonce(n) = tx.tag() {
                nonces.entry(tx.sender()).or_default().insert(*n);
            }
        }
        let mut reachable: BTreeMap<Address, u64> = BTreeMap::new();
        for (sender, set) in &nonces {
            let Some(account) = self.accounts.get(sender) else { continue };
            let Some(counter) = account.counter() else { continue };
            let mut next = counter;
            while set.contains(&next) {
                next += 1;
            }
            reachable.insert(*sender, next);
        }
        pending
            .iter()
            .filter(|tx| {
                let OrderingTag::Nonce(n) = tx.tag() else { return false };
                let Some(limit) = reachable.get(&tx.sender()) else { return false };
                *n >= *limit
            })
            .map(|tx| tx.id())
            .collect()
    }

    /// Sum of all balances. Applying transactions and blocks never changes
    /// it: fees move to the producer, values to the recipient.
    pub fn total_supply(&self) -> u128 {
        self.accounts.values().map(|a| u128::from(a.balance)).sum()
    }

    /// SHA-256 of a canonical serialization of the whole state; two ledgers
    /// agree on state iff their hashes match.
    pub fn state_hash(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(b"ledger-state-v1");
        match self.mode {
            OrderingMode::Nonce => hasher.update([0u8]),
            OrderingMode::Bvc { width } => {
                hasher.update([1u8]);
                hasher.update(width.to_be_bytes());
            }
        }
        hasher.update(self.next_height.to_be_bytes());
        hasher.update(self.head.as_bytes());
        for (address, account) in &self.accounts {
            hasher.update(address.as_bytes());
            hasher.update(account.balance.to_be_bytes());
            match account.ordering {
                AccountOrdering::Counter(n) => {
                    hasher.update([0u8]);
                    hasher.update(n.to_be_bytes());
                }
                AccountOrdering::Clock(clock) => {
                    hasher.update([1u8]);
                    hasher.update(clock.epoch().to_be_bytes());
                    hasher.update(clock.width().to_be_bytes());
                    let mut mask = Vec::new();
                    clock.confirmed().encode(&mut mask);
                    hasher.update(&mask);
                }
            }
        }
        hasher.finalize().into()
    }
}
