//! Transactions, addresses, and the canonical byte encoding that derives
//! transaction ids.
//!
//! The canonical encoding is a frozen wire format:
//!
//! ```text
//! sender (20 bytes)
//! recipient (20 bytes)
//! value (8 bytes, big-endian)
//! fee (8 bytes, big-endian)
//! ordering tag discriminant (1 byte: 0 = nonce, 1 = bit clock)
//! tag payload:
//!   nonce:     counter (8 bytes, big-endian)
//!   bit clock: epoch (8 bytes, big-endian)
//!              width (2 bytes, big-endian)
//!              mask  (ceil(k/8) bytes, bits b_{k-1}..b_0 packed most
//!                     significant first, final byte zero-padded low)
//! ```
//!
//! The transaction id is the SHA-256 digest of exactly these bytes, so two
//! transactions with identical fields are the same transaction. The
//! authorization stub is carried alongside, not encoded: it must echo the
//! sender and stands in for a signature.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clock::Timestamp;

/// Length of an account address in bytes.
pub const ADDRESS_LEN: usize = 20;

/// A 20-byte account address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address([u8; ADDRESS_LEN]);

/// Errors from parsing an address out of hex text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressParseError {
    #[error("address needs 1..=40 hex digits, got {0}")]
    BadLength(usize),
    #[error("address contains a non-hex digit")]
    BadDigit,
}

impl Address {
    pub fn new(bytes: [u8; ADDRESS_LEN]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; ADDRESS_LEN] {
        &self.0
    }

    /// Parses hex with an optional `0x` prefix; short strings are
    /// left-padded with zeros.
    pub fn from_hex(text: &str) -> Result<Self, AddressParseError> {
        let digits = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")).unwrap_or(text);
        if digits.is_empty() || digits.len() > 2 * ADDRESS_LEN {
            return Err(AddressParseError::BadLength(digits.len()));
        }
        let mut padded = String::with_capacity(2 * ADDRESS_LEN);
        for _ in digits.len()..2 * ADDRESS_LEN {
            padded.push('0');
        }
        padded.push_str(digits);
        let raw = hex::decode(&padded).map_err(|_| AddressParseError::BadDigit)?;
        let mut bytes = [0u8; ADDRESS_LEN];
        bytes.copy_from_slice(&raw);
        Ok(Self(bytes))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Content-derived transaction id: SHA-256 of the canonical encoding.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TxId([u8; 32]);

impl TxId {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// First 16 hex digits, the form used in traces.
    pub fn short(&self) -> String {
        hex::encode(&self.0[..8])
    }
}

impl fmt::Display for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", hex::encode(self.0))
    }
}

impl fmt::Debug for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

/// How a transaction orders itself among its sender's transactions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrderingTag {
    Nonce(u64),
    Bvc(Timestamp),
}

impl OrderingTag {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            OrderingTag::Nonce(n) => {
                out.push(0);
                out.extend_from_slice(&n.to_be_bytes());
            }
            OrderingTag::Bvc(ts) => {
                out.push(1);
                out.extend_from_slice(&ts.epoch.to_be_bytes());
                out.extend_from_slice(&ts.width().to_be_bytes());
                ts.bits.encode(out);
            }
        }
    }
}

/// A value transfer ordered by either a nonce or a bit-clock timestamp.
///
/// Fields are fixed at construction; the id always matches the canonical
/// encoding of the current fields.
#[derive(Clone, PartialEq, Eq)]
pub struct Transaction {
    sender: Address,
    recipient: Address,
    value: u64,
    fee: u64,
    tag: OrderingTag,
    auth: Address,
    id: TxId,
}

impl Transaction {
    /// Builds a well-authorized transaction (auth echoes the sender).
    pub fn new(sender: Address, recipient: Address, value: u64, fee: u64, tag: OrderingTag) -> Self {
        Self::with_auth(sender, recipient, value, fee, tag, sender)
    }

    /// Builds a transaction with an explicit authorization stub, which lets
    /// callers model a forged or corrupted submission.
    pub fn with_auth(
        sender: Address,
        recipient: Address,
        value: u64,
        fee: u64,
        tag: OrderingTag,
        auth: Address,
    ) -> Self {
        let mut tx = Self {
            sender,
            recipient,
            value,
            fee,
            tag,
            auth,
            id: TxId([0; 32]),
        };
        tx.id = TxId(Sha256::digest(tx.canonical_bytes()).into());
        tx
    }

    pub fn sender(&self) -> Address {
        self.sender
    }

    pub fn recipient(&self) -> Address {
        self.recipient
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn fee(&self) -> u64 {
        self.fee
    }

    pub fn tag(&self) -> &OrderingTag {
        &self.tag
    }

    pub fn id(&self) -> TxId {
        self.id
    }

    /// True when the authorization stub echoes the sender.
    pub fn auth_ok(&self) -> bool {
        self.auth == self.sender
    }

    /// The canonical byte encoding the id is derived from.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * ADDRESS_LEN + 8 + 8 + 1 + 8 + 2 + 32);
        out.extend_from_slice(&self.sender.0);
        out.extend_from_slice(&self.recipient.0);
        out.extend_from_slice(&self.value.to_be_bytes());
        out.extend_from_slice(&self.fee.to_be_bytes());
        self.tag.encode(&mut out);
        out
    }
}

impl fmt::Debug for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Transaction({} {} -> {}, value {}, fee {}, {:?})",
            self.id.short(),
            self.sender,
            self.recipient,
            self.value,
            self.fee,
            self.tag
        )
    }
}
