//! Core state machine for a miniature account ledger that can order each
//! sender's transactions in one of two ways: a classic per-account nonce
//! counter, or an epoch plus fixed-width bit mask (a "bit clock") in which a
//! transaction claims exactly one fresh bit and may cite earlier bits as
//! dependencies.
//!
//! The bit clock admits a partial order: transactions of one sender that do
//! not depend on each other commute, so a lost or delayed transaction only
//! stalls its own descendants. A nonce counter by contrast forms a total
//! order and any gap stalls everything behind it.
//!
//! Modules:
//! - [`mask`]: fixed-width bit vectors (width 1..=256) with lattice ops
//! - [`clock`]: timestamps, per-account clock state, confirmability
//! - [`lattice`]: exhaustive comparability enumeration for small widths
//! - [`tx`]: canonical transaction encoding and content-derived ids
//! - [`ledger`]: account book, block application, state hashing
//! - [`mempool`]: pending pool with readiness classes and eviction
//! - [`wallet`]: sender-side timestamp allocation and reissue

pub mod clock;
pub mod lattice;
pub mod ledger;
pub mod mask;
pub mod mempool;
pub mod tx;
pub mod wallet;

pub use clock::{CausalOrder, ClockError, ClockState, ConfirmDecision, Timestamp};
pub use lattice::{enumerate_lattice, ComparabilityMatrix, MAX_LATTICE_WIDTH};
pub use ledger::{
    Account, AccountOrdering, Block, BlockError, BlockId, Ledger, LedgerError, OrderingMode,
    RejectReason,
};
pub use mask::{BitMask, MAX_WIDTH};
pub use mempool::{EvictionReason, EvictionRecord, InsertError, Mempool, MempoolConfig, TxClass};
pub use tx::{Address, AddressParseError, OrderingTag, Transaction, TxId, ADDRESS_LEN};
pub use wallet::{IssueStatus, Wallet, WalletError};
