use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bundle::{bit_iter, mask};
use crate::{Bundle, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GsvmRole {
    Regional,
    National,
}

/// A GSVM-style bidder: per-item values on an interest set, with a 20%
/// complementarity bonus per additional item of interest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GsvmBidder {
    pub role: GsvmRole,
    /// Value of each item; zero outside the interest set.
    pub item_values: Vec<f64>,
}

impl GsvmBidder {
    pub fn interest(&self) -> u64 {
        self.item_values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .fold(0, |acc, (j, _)| acc | 1 << j)
    }
}

/// `Σ_{j ∈ x̄} v_j · (1 + 0.2 (|x̄| - 1))` where `x̄` is `x` restricted to the
/// items with positive value.
pub fn gsvm_value(item_values: &[f64], bits: u64) -> f64 {
    let mut sum = 0.0;
    let mut k = 0usize;
    for j in bit_iter(bits) {
        let v = item_values[j];
        if v > 0.0 {
            sum += v;
            k += 1;
        }
    }
    if k == 0 {
        0.0
    } else {
        sum * (1.0 + 0.2 * (k as f64 - 1.0))
    }
}

/// Additive values plus pairwise synergies, clamped at zero from below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoWiseBidder {
    pub weights: Vec<f64>,
    /// Nonzero pair terms `(j, j', w_jj')` with `j < j'`.
    pub pairs: Vec<(usize, usize, f64)>,
}

impl TwoWiseBidder {
    pub fn raw_value(&self, bits: u64) -> f64 {
        let mut v: f64 = bit_iter(bits).map(|j| self.weights[j]).sum();
        for &(j, k, w) in &self.pairs {
            if bits >> j & 1 == 1 && bits >> k & 1 == 1 {
                v += w;
            }
        }
        v
    }
}

/// An explicit value table indexed by bundle mask (small domains and tests).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableValuation {
    pub m: usize,
    pub values: Vec<f64>,
}

impl TableValuation {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m > 20 {
            return Err(Error::Capability("value tables support at most 20 items".into()));
        }
        if values.len() != 1 << m {
            return Err(Error::DimensionMismatch { expected: 1 << m, found: values.len() });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidValue(bad));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidParameter("value of the empty bundle must be 0".into()));
        }
        Ok(TableValuation { m, values })
    }

    /// Builds a table from explicit `(bundle, value)` pairs; unlisted bundles are worth 0.
    pub fn from_pairs(m: usize, pairs: &[(Bundle, f64)]) -> Result<Self> {
        let mut values = alloc::vec![0.0; 1 << m];
        for (b, v) in pairs {
            values[b.bits() as usize] = *v;
        }
        Self::new(m, values)
    }
}

/// A bidder's true value function `v_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BidderValuation {
    Gsvm(GsvmBidder),
    #[serde(rename = "twowise")]
    TwoWise(TwoWiseBidder),
    Table(TableValuation),
}

impl BidderValuation {
    pub fn value(&self, x: &Bundle) -> f64 {
        self.value_bits(x.bits())
    }

    pub fn value_bits(&self, bits: u64) -> f64 {
        match self {
            BidderValuation::Gsvm(g) => gsvm_value(&g.item_values, bits),
            BidderValuation::TwoWise(t) => t.raw_value(bits).max(0.0),
            BidderValuation::Table(t) => t.values[bits as usize],
        }
    }

    pub fn num_items(&self) -> usize {
        match self {
            BidderValuation::Gsvm(g) => g.item_values.len(),
            BidderValuation::TwoWise(t) => t.weights.len(),
            BidderValuation::Table(t) => t.m,
        }
    }

    /// Items that can affect the value; other items are worth nothing.
    pub fn relevant_items(&self) -> u64 {
        match self {
            BidderValuation::Gsvm(g) => g.interest(),
            _ => mask(self.num_items()),
        }
    }

    /// Exact quadratic pseudo-Boolean form of the value, where one exists.
    pub fn quadratic_form(&self) -> Option<QuadraticForm> {
        let m = self.num_items();
        match self {
            BidderValuation::Gsvm(g) => {
                let mut q = QuadraticForm::zeros(m);
                for j in 0..m {
                    let vj = g.item_values[j];
                    if vj > 0.0 {
                        q.linear[j] = vj;
                        for k in j + 1..m {
                            let vk = g.item_values[k];
                            if vk > 0.0 {
                                q.set_pair(j, k, 0.2 * (vj + vk));
                            }
                        }
                    }
                }
                Some(q)
            }
            BidderValuation::TwoWise(t) => {
                let mut q = QuadraticForm::zeros(m);
                q.linear.copy_from_slice(&t.weights);
                for &(j, k, w) in &t.pairs {
                    q.set_pair(j, k, q.pair(j, k) + w);
                }
                q.clamp_at_zero = true;
                Some(q)
            }
            BidderValuation::Table(_) => None,
        }
    }

    pub fn role_name(&self) -> alloc::string::String {
        match self {
            BidderValuation::Gsvm(g) => match g.role {
                GsvmRole::Regional => "regional".into(),
                GsvmRole::National => "national".into(),
            },
            BidderValuation::TwoWise(_) => "twowise".to_string(),
            BidderValuation::Table(_) => "table".to_string(),
        }
    }
}

/// `q(x) = Σ_{j∈x} h_j + Σ_{j<j' ∈ x} Q_jj'`, optionally clamped at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub m: usize,
    pub linear: Vec<f64>,
    /// Symmetric `m x m` row-major matrix with zero diagonal.
    pub pairs: Vec<f64>,
    pub clamp_at_zero: bool,
}

impl QuadraticForm {
    pub fn zeros(m: usize) -> Self {
        QuadraticForm { m, linear: alloc::vec![0.0; m], pairs: alloc::vec![0.0; m * m], clamp_at_zero: false }
    }

    #[inline]
    pub fn pair(&self, j: usize, k: usize) -> f64 {
        self.pairs[j * self.m + k]
    }

    pub fn set_pair(&mut self, j: usize, k: usize, w: f64) {
        assert!(j != k);
        self.pairs[j * self.m + k] = w;
        self.pairs[k * self.m + j] = w;
    }

    /// Unclamped value.
    pub fn raw(&self, bits: u64) -> f64 {
        let mut v = 0.0;
        let mut rest = bits;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            v += self.linear[j];
            let row = &self.pairs[j * self.m..(j + 1) * self.m];
            for k in bit_iter(rest) {
                v += row[k];
            }
        }
        v
    }

    pub fn value(&self, bits: u64) -> f64 {
        let v = self.raw(bits);
        if self.clamp_at_zero {
            v.max(0.0)
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gsvm_examples() {
        let v = [3.0, 5.0];
        assert_eq!(gsvm_value(&v, 0b01), 3.0);
        assert!((gsvm_value(&v, 0b11) - 9.6).abs() < 1e-12);
        assert_eq!(gsvm_value(&v, 0), 0.0);
        let w = [3.0, 5.0, 0.0];
        assert!((gsvm_value(&w, 0b111) - 9.6).abs() < 1e-12);
    }

    #[test]
    fn twowise_example() {
        let t = TwoWiseBidder { weights: alloc::vec![2.0, 3.0], pairs: alloc::vec![(0, 1, -1.0)] };
        let v = BidderValuation::TwoWise(t);
        assert_eq!(v.value(&Bundle::parse("11").unwrap()), 4.0);
        let neg = BidderValuation::TwoWise(TwoWiseBidder {
            weights: alloc::vec![0.5, 0.5],
            pairs: alloc::vec![(0, 1, -3.0)],
        });
        assert_eq!(neg.value(&Bundle::parse("11").unwrap()), 0.0);
    }

    #[test]
    fn quadratic_forms_match_values() {
        let g = BidderValuation::Gsvm(GsvmBidder {
            role: GsvmRole::Regional,
            item_values: alloc::vec![3.0, 0.0, 5.0, 1.5],
        });
        let t = BidderValuation::TwoWise(TwoWiseBidder {
            weights: alloc::vec![0.5, 1.0, 0.2, 4.0],
            pairs: alloc::vec![(0, 1, -3.0), (2, 3, 2.0)],
        });
        for v in [g, t] {
            let q = v.quadratic_form().unwrap();
            for b in 0..16u64 {
                assert!((q.value(b) - v.value_bits(b)).abs() < 1e-12);
            }
        }
    }
}
