//! Append-only run trace: one line per simulation event, five
//! space-separated columns, `-` for an absent value:
//!
//! ```text
//! time node kind id info
//! ```
//!
//! `time` is milliseconds, `node` a node index, `kind` the event kind, `id`
//! the first 16 hex digits of a transaction or block id, and `info` a
//! comma-separated list of `key=value` pairs. The trace hash is the SHA-256
//! of the exact bytes, so two runs match iff their traces are
//! byte-identical.

use sha2::{Digest, Sha256};

#[derive(Default)]
pub struct TraceBuilder {
    lines: String,
}

impl TraceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one line. `info` must not contain spaces.
    pub fn record(&mut self, time: u64, node: Option<usize>, kind: &str, id: &str, info: &str) {
        use std::fmt::Write;
        let id = if id.is_empty() { "-" } else { id };
        let info = if info.is_empty() { "-" } else { info };
        debug_assert!(!kind.contains(' ') && !id.contains(' ') && !info.contains(' '));
        match node {
            Some(n) => writeln!(self.lines, "{time} {n} {kind} {id} {info}"),
            None => writeln!(self.lines, "{time} - {kind} {id} {info}"),
        }
        .expect("writing to a String");
    }

    pub fn finish(self) -> (String, [u8; 32]) {
        let hash = Sha256::digest(self.lines.as_bytes()).into();
        (self.lines, hash)
    }
}
