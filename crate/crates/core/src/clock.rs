//! Timestamps and per-account clock state.
//!
//! A timestamp is an `(epoch, bits)` pair: the set bits are the sender's own
//! fresh bit plus the bits of any same-epoch transactions it depends on.
//! Within one epoch timestamps order by bit-set inclusion, which is only a
//! partial order; across epochs the epoch number decides. An account's clock
//! state accumulates confirmed bits by bitwise union and rolls to the next
//! epoch the moment the mask fills, so a full mask is never stored.

use std::fmt;

use thiserror::Error;

use crate::mask::BitMask;

/// Errors from the clock algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ClockError {
    #[error("mask width {0} outside supported range 1..=256")]
    InvalidWidth(u16),
    #[error("mask width mismatch: {left} vs {right}")]
    WidthMismatch { left: u16, right: u16 },
    #[error("bit index {index} out of range for width {width}")]
    BitOutOfRange { index: u32, width: u16 },
    #[error("timestamp claims no bits")]
    EmptyTimestamp,
    #[error("timestamp is not confirmable in the current state")]
    NotConfirmable,
    #[error("lattice enumeration caps width at {max}, got {got}")]
    WidthTooLargeForLattice { got: u16, max: u16 },
}

/// Outcome of comparing two timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalOrder {
    Before,
    After,
    Equal,
    Incomparable,
}

impl CausalOrder {
    /// The comparison with the arguments swapped.
    pub fn flip(self) -> Self {
        match self {
            CausalOrder::Before => CausalOrder::After,
            CausalOrder::After => CausalOrder::Before,
            other => other,
        }
    }

    /// Single-letter code used in matrix printouts: B, A, E, I.
    pub fn letter(self) -> char {
        match self {
            CausalOrder::Before => 'B',
            CausalOrder::After => 'A',
            CausalOrder::Equal => 'E',
            CausalOrder::Incomparable => 'I',
        }
    }
}

/// An `(epoch, bits)` ordering timestamp carried by a transaction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Timestamp {
    pub epoch: u64,
    pub bits: BitMask,
}

impl Timestamp {
    pub fn new(epoch: u64, bits: BitMask) -> Self {
        Self { epoch, bits }
    }

    pub fn width(&self) -> u16 {
        self.bits.width()
    }

    /// A well-formed timestamp claims at least one bit.
    pub fn validate(&self) -> Result<(), ClockError> {
        if self.bits.is_zero() {
            return Err(ClockError::EmptyTimestamp);
        }
        Ok(())
    }

    /// Causal comparison: earlier epoch wins outright; within an epoch,
    /// bit-set inclusion decides, and mutual non-inclusion is incomparable.
    pub fn compare(&self, other: &Timestamp) -> Result<CausalOrder, ClockError> {
        if self.epoch < other.epoch {
            self.bits.leq(&other.bits).map(|_| ())?;
            return Ok(CausalOrder::Before);
        }
        if self.epoch > other.epoch {
            self.bits.leq(&other.bits).map(|_| ())?;
            return Ok(CausalOrder::After);
        }
        let forward = self.bits.leq(&other.bits)?;
        let backward = other.bits.leq(&self.bits)?;
        Ok(match (forward, backward) {
            (true, true) => CausalOrder::Equal,
            (true, false) => CausalOrder::Before,
            (false, true) => CausalOrder::After,
            (false, false) => CausalOrder::Incomparable,
        })
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.epoch, self.bits)
    }
}

impl fmt::Debug for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Verdict on a timestamp against an account's clock state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfirmDecision {
    /// Exactly one claimed bit is new; `new_bit` holds it alone.
    Confirmable { new_bit: BitMask },
    /// More than one claimed bit is unconfirmed. `missing` lists the fresh
    /// bits other than the highest one, a diagnostic for which dependencies
    /// have not landed yet (the highest fresh bit is presumed the
    /// transaction's own).
    MissingDependencies { missing: BitMask },
    /// Timestamp epoch is ahead of the account's.
    FutureEpoch,
    /// Timestamp epoch is behind the account's.
    PastEpoch,
    /// Every claimed bit is already confirmed.
    AlreadyCovered,
}

impl ConfirmDecision {
    pub fn is_confirmable(&self) -> bool {
        matches!(self, ConfirmDecision::Confirmable { .. })
    }
}

/// Confirmed-side clock of one account: current epoch plus the mask of
/// confirmed bits.
///
/// Invariant: the mask is never full. Confirming the last bit of an epoch
/// rolls the state to `(epoch + 1, zero)` immediately.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClockState {
    epoch: u64,
    confirmed: BitMask,
}

impl ClockState {
    /// Fresh state `(0, zero)`.
    pub fn new(width: u16) -> Result<Self, ClockError> {
        Ok(Self { epoch: 0, confirmed: BitMask::zero(width)? })
    }

    /// Builds a state from parts, normalizing a full mask to the next
    /// epoch's empty mask.
    pub fn from_parts(epoch: u64, confirmed: BitMask) -> Self {
        if confirmed.is_full() {
            let width = confirmed.width();
            return Self {
                epoch: epoch + 1,
                confirmed: BitMask::zero(width).expect("width of an existing mask is valid"),
            };
        }
        Self { epoch, confirmed }
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn confirmed(&self) -> BitMask {
        self.confirmed
    }

    pub fn width(&self) -> u16 {
        self.confirmed.width()
    }

    /// The state viewed as a timestamp, for lattice-order comparisons.
    pub fn as_timestamp(&self) -> Timestamp {
        Timestamp::new(self.epoch, self.confirmed)
    }

    /// Classifies a timestamp. Epoch gates first; within the epoch, the
    /// fresh bits `ts.bits AND NOT confirmed` decide: none already covered,
    /// exactly one confirmable, more than one still missing dependencies.
    pub fn confirmability(&self, ts: &Timestamp) -> Result<ConfirmDecision, ClockError> {
        ts.validate()?;
        // Surface width mismatches even when the epoch alone would decide.
        let fresh = ts.bits.minus(&self.confirmed)?;
        if ts.epoch > self.epoch {
            return Ok(ConfirmDecision::FutureEpoch);
        }
        if ts.epoch < self.epoch {
            return Ok(ConfirmDecision::PastEpoch);
        }
        Ok(match fresh.count_ones() {
            0 => ConfirmDecision::AlreadyCovered,
            1 => ConfirmDecision::Confirmable { new_bit: fresh },
            _ => ConfirmDecision::MissingDependencies { missing: fresh.drop_highest_bit() },
        })
    }

    /// Confirms a confirmable timestamp: unions its bits into the mask and
    /// rolls the epoch if that fills it. Anything not `Confirmable` is
    /// rejected with [`ClockError::NotConfirmable`].
    pub fn merge(&self, ts: &Timestamp) -> Result<ClockState, ClockError> {
        if !self.confirmability(ts)?.is_confirmable() {
            return Err(ClockError::NotConfirmable);
        }
        let joined = self.confirmed.join(&ts.bits)?;
        Ok(Self::from_parts(self.epoch, joined))
    }
}

impl fmt::Display for ClockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.epoch, self.confirmed)
    }
}

impl fmt::Debug for ClockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
