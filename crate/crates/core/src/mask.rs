//! Fixed-width bit vectors. Every mask in a network shares one width `k`
//! (1..=256); operations between masks of different widths are errors, not
//! silent truncation.

use std::fmt;

use crate::clock::ClockError;

/// Largest supported mask width.
pub const MAX_WIDTH: u16 = 256;

const WORDS: usize = (MAX_WIDTH as usize) / 64;

/// A bit vector of fixed width `k`. Bit 0 is the lowest-order bit; display
/// follows the `[b_{k-1}, ..., b_0]` convention, so bit 0 prints last.
///
/// Invariant: bits at positions `>= width` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitMask {
    width: u16,
    words: [u64; WORDS],
}

impl BitMask {
    /// The all-zero mask of the given width.
    pub fn zero(width: u16) -> Result<Self, ClockError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(ClockError::InvalidWidth(width));
        }
        Ok(Self { width, words: [0; WORDS] })
    }

    /// A mask with exactly one bit set.
    pub fn single(width: u16, bit: u32) -> Result<Self, ClockError> {
        Self::zero(width)?.with_bit(bit)
    }

    /// Builds a mask from the low bits of `value`; convenient for widths up
    /// to 64. Fails if `value` has bits at or above `width`.
    pub fn from_value(width: u16, value: u64) -> Result<Self, ClockError> {
        let mut mask = Self::zero(width)?;
        if width < 64 && value >> width != 0 {
            let index = 63 - value.leading_zeros();
            return Err(ClockError::BitOutOfRange { index, width });
        }
        mask.words[0] = value;
        Ok(mask)
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn bit(&self, index: u32) -> bool {
        if index >= u32::from(self.width) {
            return false;
        }
        self.words[(index / 64) as usize] >> (index % 64) & 1 == 1
    }

    /// Copy of `self` with one extra bit set.
    pub fn with_bit(mut self, index: u32) -> Result<Self, ClockError> {
        if index >= u32::from(self.width) {
            return Err(ClockError::BitOutOfRange { index, width: self.width });
        }
        self.words[(index / 64) as usize] |= 1u64 << (index % 64);
        Ok(self)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// True when every one of the `width` positions is set.
    pub fn is_full(&self) -> bool {
        self.count_ones() == u32::from(self.width)
    }

    fn check_width(&self, other: &Self) -> Result<(), ClockError> {
        if self.width != other.width {
            return Err(ClockError::WidthMismatch { left: self.width, right: other.width });
        }
        Ok(())
    }

    /// Set inclusion: true iff every bit of `self` is also set in `other`.
    pub fn leq(&self, other: &Self) -> Result<bool, ClockError> {
        self.check_width(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    /// Bitwise union, the least upper bound of the two masks.
    pub fn join(&self, other: &Self) -> Result<Self, ClockError> {
        self.check_width(other)?;
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
        Ok(out)
    }

    /// Set difference: the bits of `self` not present in `other`.
    pub fn minus(&self, other: &Self) -> Result<Self, ClockError> {
        self.check_width(other)?;
        let mut out = *self;
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        Ok(out)
    }

    /// Lowest position `< width` whose bit is clear.
    pub fn lowest_clear_bit(&self) -> Option<u32> {
        for (i, w) in self.words.iter().enumerate() {
            if *w != u64::MAX {
                let bit = i as u32 * 64 + w.trailing_ones();
                if bit < u32::from(self.width) {
                    return Some(bit);
                }
                return None;
            }
        }
        None
    }

    /// Highest set position, if any bit is set.
    pub fn highest_set_bit(&self) -> Option<u32> {
        for (i, w) in self.words.iter().enumerate().rev() {
            if *w != 0 {
                return Some(i as u32 * 64 + 63 - w.leading_zeros());
            }
        }
        None
    }

    /// Copy of `self` with the highest set bit cleared; identity on zero.
    pub fn drop_highest_bit(&self) -> Self {
        let mut out = *self;
        if let Some(bit) = self.highest_set_bit() {
            out.words[(bit / 64) as usize] &= !(1u64 << (bit % 64));
        }
        out
    }

    /// Appends the canonical wire form: bits `b_{k-1}..b_0` packed most
    /// significant first into `ceil(k/8)` bytes, the final byte zero-padded
    /// in its low positions.
    pub fn encode(&self, out: &mut Vec<u8>) {
        let width = u32::from(self.width);
        let bytes = (width as usize + 7) / 8;
        for byte_index in 0..bytes {
            let mut byte = 0u8;
            for offset in 0..8u32 {
                let stream_pos = byte_index as u32 * 8 + offset;
                if stream_pos < width && self.bit(width - 1 - stream_pos) {
                    byte |= 1 << (7 - offset);
                }
            }
            out.push(byte);
        }
    }

    /// Compact digit string `b_{k-1}..b_0`, e.g. `101` for width 3.
    pub fn digits(&self) -> String {
        (0..u32::from(self.width))
            .rev()
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, i) in (0..u32::from(self.width)).rev().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
