//! Bundles of items as fixed-width bit sets.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest supported number of items.
pub const MAX_ITEMS: usize = 64;

/// A subset of the items `0..m`, stored as a bit mask.
///
/// Bundles compare lexicographically with item 0 as the most significant
/// position, i.e. in the order of their bit strings (`"0011" < "0100"`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bundle {
    bits: u64,
    width: u8,
}

#[inline]
pub(crate) fn mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

impl Bundle {
    /// The empty bundle over `m` items.
    pub fn empty(m: usize) -> Self {
        assert!(m <= MAX_ITEMS, "at most 64 items");
        Bundle { bits: 0, width: m as u8 }
    }

    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ITEMS, "at most 64 items");
        Bundle { bits: mask(m), width: m as u8 }
    }

    /// Builds a bundle from a raw mask; bits at positions `>= m` are dropped.
    pub fn from_bits(m: usize, bits: u64) -> Self {
        assert!(m <= MAX_ITEMS, "at most 64 items");
        Bundle { bits: bits & mask(m), width: m as u8 }
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(m: usize, items: I) -> Self {
        let mut b = Bundle::empty(m);
        for j in items {
            assert!(j < m, "item {j} out of range for m = {m}");
            b.bits |= 1 << j;
        }
        b
    }

    /// Parses a bit string such as `"0101"`; character `j` is item `j`.
    pub fn parse(s: &str) -> Result<Self> {
        if s.len() > MAX_ITEMS {
            return Err(Error::TooManyItems(s.len()));
        }
        let mut bits = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return Err(Error::InvalidBundle(s.into())),
            }
        }
        Ok(Bundle { bits, width: s.len() as u8 })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of items `m` in the domain.
    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Number of items in the bundle.
    #[inline]
    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(&self, j: usize) -> bool {
        j < self.width() && self.bits >> j & 1 == 1
    }

    pub fn with(&self, j: usize) -> Self {
        assert!(j < self.width());
        Bundle { bits: self.bits | 1 << j, width: self.width }
    }

    pub fn without(&self, j: usize) -> Self {
        Bundle { bits: self.bits & !(1 << j), width: self.width }
    }

    pub fn union(&self, other: &Bundle) -> Self {
        Bundle { bits: self.bits | other.bits, width: self.width }
    }

    pub fn intersection(&self, other: &Bundle) -> Self {
        Bundle { bits: self.bits & other.bits, width: self.width }
    }

    #[inline]
    pub fn overlaps(&self, other: &Bundle) -> bool {
        self.bits & other.bits != 0
    }

    /// Number of shared items, i.e. the dot product of the indicator vectors.
    #[inline]
    pub fn dot(&self, other: &Bundle) -> u32 {
        (self.bits & other.bits).count_ones()
    }

    #[inline]
    pub fn hamming(&self, other: &Bundle) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Items in ascending order.
    pub fn items(&self) -> Items {
        Items { bits: self.bits }
    }

    /// Key whose integer order equals the lexicographic order of bit strings.
    #[inline]
    pub fn lex_key(&self) -> u64 {
        lex_key(self.bits, self.width())
    }

    pub fn lex_cmp(&self, other: &Bundle) -> Ordering {
        self.lex_key().cmp(&other.lex_key())
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.width())
            .map(|j| if self.contains(j) { '1' } else { '0' })
            .collect()
    }

    /// Indicator vector as floats.
    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.width())
            .map(|j| if self.contains(j) { 1.0 } else { 0.0 })
            .collect()
    }

    /// All `2^m` bundles in increasing mask order. Requires `m < 64`.
    pub fn all(m: usize) -> impl Iterator<Item = Bundle> {
        assert!(m < 64);
        (0..1u64 << m).map(move |b| Bundle::from_bits(m, b))
    }
}

#[inline]
pub(crate) fn lex_key(bits: u64, m: usize) -> u64 {
    if m == 0 {
        0
    } else {
        bits.reverse_bits() >> (64 - m)
    }
}

pub struct Items {
    bits: u64,
}

impl Iterator for Items {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let j = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(j)
    }
}

/// Iterates over the set bits of a mask.
#[inline]
pub(crate) fn bit_iter(bits: u64) -> Items {
    Items { bits }
}

impl PartialOrd for Bundle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bundle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.lex_cmp(other))
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.width() {
            f.write_str(if self.contains(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bundle({self})")
    }
}

impl Serialize for Bundle {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for Bundle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Bundle::parse(&s).map_err(serde::de::Error::custom)
    }
}
