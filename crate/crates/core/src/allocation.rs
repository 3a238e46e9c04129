//! Allocations, payments and economies.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Bundle, Error, Result};

/// One bundle per bidder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation { bundles }
    }

    pub fn empty(n: usize, m: usize) -> Self {
        Allocation { bundles: alloc::vec![Bundle::empty(m); n] }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, i: usize) -> Bundle {
        self.bundles[i]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn set(&mut self, i: usize, b: Bundle) {
        self.bundles[i] = b;
    }

    /// Whether no item is allocated twice.
    pub fn is_feasible(&self) -> bool {
        let mut used = 0u64;
        for b in &self.bundles {
            if used & b.bits() != 0 {
                return false;
            }
            used |= b.bits();
        }
        true
    }

    /// Compares allocations bidder by bidder in bundle lexicographic order.
    pub fn lex_cmp(&self, other: &Allocation) -> core::cmp::Ordering {
        for (a, b) in self.bundles.iter().zip(&other.bundles) {
            let o = a.lex_cmp(b);
            if o.is_ne() {
                return o;
            }
        }
        core::cmp::Ordering::Equal
    }
}

/// Feasibility check that also validates that all bundles share one width.
pub fn feasible(a: &Allocation) -> Result<bool> {
    if let Some(first) = a.bundles.first() {
        for b in &a.bundles {
            if b.width() != first.width() {
                return Err(Error::DimensionMismatch { expected: first.width(), found: b.width() });
            }
        }
    }
    Ok(a.is_feasible())
}

/// Payment vector, one entry per bidder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payments(pub Vec<f64>);

impl Payments {
    pub fn zeros(n: usize) -> Self {
        Payments(alloc::vec![0.0; n])
    }

    pub fn revenue(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

/// A nonempty subset of the bidders `0..n`: the main economy or a marginal one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EconomyIndex {
    n: u32,
    mask: u64,
}

impl EconomyIndex {
    /// All `n` bidders.
    pub fn main(n: usize) -> Self {
        assert!((1..=64).contains(&n));
        EconomyIndex { n: n as u32, mask: crate::bundle::mask(n) }
    }

    /// All bidders except `i`.
    pub fn marginal(n: usize, i: usize) -> Self {
        assert!(i < n && n >= 2);
        let e = Self::main(n);
        EconomyIndex { n: e.n, mask: e.mask & !(1 << i) }
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::InvalidParameter("economy size must be in 1..=64".into()));
        }
        let mut mask = 0u64;
        for i in members {
            if i >= n {
                return Err(Error::DimensionMismatch { expected: n, found: i + 1 });
            }
            mask |= 1 << i;
        }
        Ok(EconomyIndex { n: n as u32, mask })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n() && self.mask >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_main(&self) -> bool {
        self.len() == self.n()
    }

    pub fn members(&self) -> crate::bundle::Items {
        crate::bundle::bit_iter(self.mask)
    }
}
