//! Sender-side state: allocates ordering timestamps, tracks what was
//! issued, and reissues invalidated transactions.
//!
//! A bit-clock wallet keeps a local epoch and the mask of bits it has
//! already handed out in that epoch. Each new transaction takes the lowest
//! free bit; when no bit is free the wallet moves to the next epoch and
//! starts from bit 0. Declared dependencies contribute their bits to the
//! new timestamp only when they live in the same epoch as it; a dependency
//! from an earlier epoch is already implied by epoch order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::clock::{CausalOrder, ClockError, ClockState, Timestamp};
use crate::mask::BitMask;
use crate::tx::{Address, OrderingTag, Transaction, TxId};

/// Errors from wallet operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalletError {
    #[error("unknown dependency {0:?}")]
    UnknownDependency(TxId),
    #[error("unknown transaction {0:?}")]
    UnknownTransaction(TxId),
    #[error("transaction {0:?} is not invalidated")]
    NotInvalidated(TxId),
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// Lifecycle of one issued transaction, as the wallet knows it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IssueStatus {
    Pending,
    Confirmed,
    Invalidated,
}

#[derive(Clone, Debug)]
struct IssuedRecord {
    tx: Transaction,
    deps: Vec<TxId>,
    status: IssueStatus,
}

#[derive(Clone, Debug)]
enum OrderingSide {
    Nonce { next: u64 },
    Bvc { local_epoch: u64, allocated: BitMask, confirmed: ClockState },
}

/// One account's sending state.
#[derive(Clone, Debug)]
pub struct Wallet {
    address: Address,
    side: OrderingSide,
    issued: BTreeMap<TxId, IssuedRecord>,
}

impl Wallet {
    /// A bit-clock wallet starting at epoch 0 with nothing allocated.
    pub fn new_bvc(address: Address, width: u16) -> Result<Self, WalletError> {
        Ok(Self {
            address,
            side: OrderingSide::Bvc {
                local_epoch: 0,
                allocated: BitMask::zero(width)?,
                confirmed: ClockState::new(width)?,
            },
            issued: BTreeMap::new(),
        })
    }

    /// A nonce wallet counting from 0.
    pub fn new_nonce(address: Address) -> Self {
        Self { address, side: OrderingSide::Nonce { next: 0 }, issued: BTreeMap::new() }
    }

    pub fn address(&self) -> Address {
        self.address
    }

    /// Local epoch of a bit-clock wallet.
    pub fn local_epoch(&self) -> Option<u64> {
        match &self.side {
            OrderingSide::Bvc { local_epoch, .. } => Some(*local_epoch),
            OrderingSide::Nonce { .. } => None,
        }
    }

    /// Bits already handed out in the local epoch.
    pub fn allocated(&self) -> Option<BitMask> {
        match &self.side {
            OrderingSide::Bvc { allocated, .. } => Some(*allocated),
            OrderingSide::Nonce { .. } => None,
        }
    }

    /// Last confirmed clock state the wallet has heard of.
    pub fn confirmed_clock(&self) -> Option<ClockState> {
        match &self.side {
            OrderingSide::Bvc { confirmed, .. } => Some(*confirmed),
            OrderingSide::Nonce { .. } => None,
        }
    }

    /// Nonce the next transaction would carry.
    pub fn next_nonce(&self) -> Option<u64> {
        match &self.side {
            OrderingSide::Nonce { next } => Some(*next),
            OrderingSide::Bvc { .. } => None,
        }
    }

    pub fn status(&self, id: &TxId) -> Option<IssueStatus> {
        self.issued.get(id).map(|r| r.status)
    }

    pub fn issued_tx(&self, id: &TxId) -> Option<&Transaction> {
        self.issued.get(id).map(|r| &r.tx)
    }

    /// Builds, records, and returns the next transaction. `deps` must name
    /// transactions this wallet issued; they order the new transaction
    /// after themselves. Nonce wallets take them as bookkeeping only, since
    /// the counter already orders everything totally.
    pub fn issue(
        &mut self,
        recipient: Address,
        value: u64,
        fee: u64,
        deps: &[TxId],
    ) -> Result<Transaction, WalletError> {
        for dep in deps {
            if !self.issued.contains_key(dep) {
                return Err(WalletError::UnknownDependency(*dep));
            }
        }
        let tag = match &mut self.side {
            OrderingSide::Nonce { next } => {
                let n = *next;
                *next += 1;
                OrderingTag::Nonce(n)
            }
            OrderingSide::Bvc { local_epoch, allocated, .. } => {
                // Take the lowest free bit, advancing the epoch when full.
                let own = match allocated.lowest_clear_bit() {
                    Some(bit) => bit,
                    None => {
                        *local_epoch += 1;
                        *allocated = BitMask::zero(allocated.width())?;
                        0
                    }
                };
                let mut bits = BitMask::single(allocated.width(), own)?;
                for dep in deps {
                    let record = self.issued.get(dep).expect("checked above");
                    if let OrderingTag::Bvc(dep_ts) = record.tx.tag() {
                        if dep_ts.epoch == *local_epoch {
                            bits = bits.join(&dep_ts.bits)?;
                        }
                    }
                }
                *allocated = allocated.with_bit(own)?;
                OrderingTag::Bvc(Timestamp::new(*local_epoch, bits))
            }
        };
        let tx = Transaction::new(self.address, recipient, value, fee, tag);
        self.issued.insert(
            tx.id(),
            IssuedRecord { tx: tx.clone(), deps: deps.to_vec(), status: IssueStatus::Pending },
        );
        Ok(tx)
    }

    /// Records a confirmation. For a bit-clock wallet `new_clock` is the
    /// account's clock after the merge; notifications that do not strictly
    /// advance the known clock are stale and change nothing. When the
    /// network's clock has moved past the local epoch (its bits all
    /// confirmed), allocation restarts in the confirmed epoch.
    pub fn on_confirmed(&mut self, id: &TxId, new_clock: Option<ClockState>) {
        match (&mut self.side, new_clock) {
            (OrderingSide::Bvc { local_epoch, allocated, confirmed }, Some(clock)) => {
                let advanced = matches!(
                    confirmed.as_timestamp().compare(&clock.as_timestamp()),
                    Ok(CausalOrder::Before)
                );
                if !advanced {
                    return;
                }
                *confirmed = clock;
                if clock.epoch() > *local_epoch {
                    *local_epoch = clock.epoch();
                    *allocated = clock.confirmed();
                }
            }
            (OrderingSide::Nonce { .. }, _) => {}
            (OrderingSide::Bvc { .. }, None) => return,
        }
        if let Some(record) = self.issued.get_mut(id) {
            record.status = IssueStatus::Confirmed;
        }
    }

    /// Records that a transaction died in the pool (its slot was consumed
    /// or it expired and was given up on). Confirmed transactions are
    /// untouched.
    pub fn on_invalidated(&mut self, id: &TxId) {
        if let Some(record) = self.issued.get_mut(id) {
            if record.status == IssueStatus::Pending {
                record.status = IssueStatus::Invalidated;
            }
        }
    }

    /// Rebuilds an invalidated transaction with a fresh ordering slot,
    /// keeping its payload and whichever of its declared dependencies are
    /// still alive.
    pub fn reissue_invalidated(&mut self, id: &TxId) -> Result<Transaction, WalletError> {
        let record = self.issued.get(id).ok_or(WalletError::UnknownTransaction(*id))?;
        if record.status != IssueStatus::Invalidated {
            return Err(WalletError::NotInvalidated(*id));
        }
        let recipient = record.tx.recipient();
        let value = record.tx.value();
        let fee = record.tx.fee();
        let live_deps: Vec<TxId> = record
            .deps
            .iter()
            .filter(|dep| {
                self.issued.get(*dep).map(|r| r.status != IssueStatus::Invalidated).unwrap_or(false)
            })
            .copied()
            .collect();
        self.issue(recipient, value, fee, &live_deps)
    }
}
