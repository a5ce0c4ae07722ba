//! Brute-force reference model for the ordering algebra, deliberately
//! naive: masks are `Vec<bool>`, every relation is computed by elementwise
//! set logic, and nothing is shared with the implementation under test.

#![allow(dead_code)]

use bvc_core::{BitMask, CausalOrder};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OracleTs {
    pub epoch: u64,
    pub bits: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleOrd {
    Before,
    After,
    Equal,
    Incomparable,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OracleDecision {
    Confirmable { new_bit: usize },
    Missing { missing: Vec<bool> },
    Future,
    Past,
    Covered,
    Malformed,
}

/// Low `width` bits of `value` as a `Vec<bool>` indexed by position.
pub fn bools(width: usize, value: u64) -> Vec<bool> {
    (0..width).map(|i| value >> i & 1 == 1).collect()
}

/// Reads a mask out of the implementation type, bit by bit.
pub fn mask_bools(mask: &BitMask) -> Vec<bool> {
    (0..u32::from(mask.width())).map(|i| mask.bit(i)).collect()
}

pub fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(x, y)| !*x || *y)
}

pub fn union(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}

pub fn compare(a: &OracleTs, b: &OracleTs) -> OracleOrd {
    if a.epoch < b.epoch {
        return OracleOrd::Before;
    }
    if a.epoch > b.epoch {
        return OracleOrd::After;
    }
    match (subset(&a.bits, &b.bits), subset(&b.bits, &a.bits)) {
        (true, true) => OracleOrd::Equal,
        (true, false) => OracleOrd::Before,
        (false, true) => OracleOrd::After,
        (false, false) => OracleOrd::Incomparable,
    }
}

pub fn order_matches(oracle: OracleOrd, real: CausalOrder) -> bool {
    matches!(
        (oracle, real),
        (OracleOrd::Before, CausalOrder::Before)
            | (OracleOrd::After, CausalOrder::After)
            | (OracleOrd::Equal, CausalOrder::Equal)
            | (OracleOrd::Incomparable, CausalOrder::Incomparable)
    )
}

/// Confirmability of `ts` against a normalized state `(epoch, bits)`.
pub fn confirmability(state_epoch: u64, state_bits: &[bool], ts: &OracleTs) -> OracleDecision {
    if ts.bits.iter().all(|b| !*b) {
        return OracleDecision::Malformed;
    }
    if ts.epoch > state_epoch {
        return OracleDecision::Future;
    }
    if ts.epoch < state_epoch {
        return OracleDecision::Past;
    }
    let fresh: Vec<bool> = ts.bits.iter().zip(state_bits).map(|(t, s)| *t && !*s).collect();
    let count = fresh.iter().filter(|b| **b).count();
    if count == 0 {
        return OracleDecision::Covered;
    }
    if count == 1 {
        return OracleDecision::Confirmable { new_bit: fresh.iter().position(|b| *b).unwrap() };
    }
    let highest = fresh.iter().rposition(|b| *b).unwrap();
    let mut missing = fresh;
    missing[highest] = false;
    OracleDecision::Missing { missing }
}

/// Merge when confirmable, with the eager epoch roll on a full mask.
pub fn merge(state_epoch: u64, state_bits: &[bool], ts: &OracleTs) -> Option<(u64, Vec<bool>)> {
    match confirmability(state_epoch, state_bits, ts) {
        OracleDecision::Confirmable { .. } => {}
        _ => return None,
    }
    let joined = union(state_bits, &ts.bits);
    if joined.iter().all(|b| *b) {
        Some((state_epoch + 1, vec![false; joined.len()]))
    } else {
        Some((state_epoch, joined))
    }
}
