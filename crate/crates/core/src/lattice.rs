//! Exhaustive comparability enumeration for one epoch at small widths.
//!
//! Lists all `2^k` masks and the pairwise causal relation between them,
//! which makes the partial order tangible: how much of the mask space is
//! mutually incomparable, hence reorderable in flight.

use crate::clock::{CausalOrder, ClockError, Timestamp};
use crate::mask::BitMask;

/// Enumeration is quadratic in `2^k`; widths beyond this are refused.
pub const MAX_LATTICE_WIDTH: u16 = 10;

/// Pairwise comparison matrix over every mask of one width, row-major:
/// entry `(i, j)` is `compare(mask_i, mask_j)` with masks indexed by their
/// integer value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparabilityMatrix {
    width: u16,
    cells: Vec<CausalOrder>,
}

impl ComparabilityMatrix {
    pub fn width(&self) -> u16 {
        self.width
    }

    /// Number of masks, `2^width`.
    pub fn size(&self) -> usize {
        1usize << self.width
    }

    pub fn mask(&self, index: usize) -> BitMask {
        BitMask::from_value(self.width, index as u64).expect("index bounded by 2^width")
    }

    pub fn get(&self, i: usize, j: usize) -> CausalOrder {
        self.cells[i * self.size() + j]
    }

    /// Count of unordered `{i, j}` pairs, `i != j`, that are incomparable.
    pub fn incomparable_pairs(&self) -> usize {
        self.incomparable_cells() / 2
    }

    /// Count of ordered `(i, j)` cells that are incomparable. Incomparability
    /// is symmetric, so this is exactly twice [`Self::incomparable_pairs`].
    pub fn incomparable_cells(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| **c == CausalOrder::Incomparable)
            .count()
    }
}

fn check_width(width: u16) -> Result<(), ClockError> {
    BitMask::zero(width)?;
    if width > MAX_LATTICE_WIDTH {
        return Err(ClockError::WidthTooLargeForLattice { got: width, max: MAX_LATTICE_WIDTH });
    }
    Ok(())
}

fn row(width: u16, i: usize) -> Vec<CausalOrder> {
    let n = 1usize << width;
    let a = Timestamp::new(0, BitMask::from_value(width, i as u64).expect("bounded"));
    (0..n)
        .map(|j| {
            let b = Timestamp::new(0, BitMask::from_value(width, j as u64).expect("bounded"));
            a.compare(&b).expect("same width")
        })
        .collect()
}

/// Sequential enumeration, always available.
pub fn enumerate_lattice_seq(width: u16) -> Result<ComparabilityMatrix, ClockError> {
    check_width(width)?;
    let n = 1usize << width;
    let cells = (0..n).flat_map(|i| row(width, i)).collect();
    Ok(ComparabilityMatrix { width, cells })
}

/// Row-parallel enumeration.
#[cfg(feature = "parallel")]
pub fn enumerate_lattice_par(width: u16) -> Result<ComparabilityMatrix, ClockError> {
    use rayon::prelude::*;
    check_width(width)?;
    let n = 1usize << width;
    let cells = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| row(width, i))
        .collect();
    Ok(ComparabilityMatrix { width, cells })
}

/// Enumerates the comparability matrix, in parallel when the `parallel`
/// feature is on.
pub fn enumerate_lattice(width: u16) -> Result<ComparabilityMatrix, ClockError> {
    #[cfg(feature = "parallel")]
    {
        enumerate_lattice_par(width)
    }
    #[cfg(not(feature = "parallel"))]
    {
        enumerate_lattice_seq(width)
    }
}
