use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::valuation::{BidderValuation, GsvmBidder, GsvmRole, TwoWiseBidder};
use crate::rng::Stream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Gsvm,
    #[serde(rename = "twowise")]
    TwoWise,
    Custom,
}

/// A generated auction instance: `n` bidders with true values over `m` items.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainInstance {
    pub generator: GeneratorKind,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub bidders: Vec<BidderValuation>,
}

impl DomainInstance {
    /// An instance from explicit valuations.
    pub fn custom(m: usize, bidders: Vec<BidderValuation>) -> Result<Self> {
        for b in &bidders {
            if b.num_items() != m {
                return Err(Error::DimensionMismatch { expected: m, found: b.num_items() });
            }
        }
        if m > 64 || m == 0 || bidders.is_empty() {
            return Err(Error::InvalidParameter("need 1..=64 items and at least one bidder".into()));
        }
        Ok(DomainInstance { generator: GeneratorKind::Custom, seed: 0, m, n: bidders.len(), bidders })
    }

    pub fn value(&self, i: usize, x: &crate::Bundle) -> f64 {
        self.bidders[i].value(x)
    }

    /// Resolves a bidder by role: `"national"`, `"regional"` (the first
    /// regional bidder) or a numeric index.
    pub fn bidder_by_role(&self, role: &str) -> Result<usize> {
        if let Ok(i) = role.parse::<usize>() {
            return if i < self.n {
                Ok(i)
            } else {
                Err(Error::InvalidParameter(alloc::format!("bidder index {i} out of range")))
            };
        }
        self.bidders
            .iter()
            .position(|b| b.role_name() == role)
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("no bidder with role {role:?}")))
    }

    pub fn roles(&self) -> Vec<String> {
        self.bidders.iter().map(|b| b.role_name()).collect()
    }
}

/// GSVM-like instance on a ring of `m` items.
///
/// Bidders `0..n-1` are regional: each is interested in a contiguous arc of
/// `⌈m/3⌉` items starting at `⌊r·m/(n-1)⌋`, with item values `U[0,20]`. The
/// last bidder is national, interested in the first `⌈2m/3⌉` items with item
/// values `U[0,10]`.
pub fn generate_gsvm(seed: u64, m: usize, n: usize) -> Result<DomainInstance> {
    if !(2..=64).contains(&m) || n < 2 {
        return Err(Error::InvalidParameter("gsvm needs 2 <= m <= 64 and n >= 2".into()));
    }
    let mut rng = Stream::new(seed, "domain/gsvm", 0);
    let regional = n - 1;
    let arc = m.div_ceil(3);
    let mut bidders = Vec::with_capacity(n);
    for r in 0..regional {
        let start = r * m / regional;
        let mut item_values = alloc::vec![0.0; m];
        for k in 0..arc {
            let j = (start + k) % m;
            item_values[j] = rng.uniform_range(0.0, 20.0);
        }
        bidders.push(BidderValuation::Gsvm(GsvmBidder { role: GsvmRole::Regional, item_values }));
    }
    let national = (2 * m).div_ceil(3);
    let mut item_values = alloc::vec![0.0; m];
    for v in item_values.iter_mut().take(national) {
        *v = rng.uniform_range(0.0, 10.0);
    }
    bidders.push(BidderValuation::Gsvm(GsvmBidder { role: GsvmRole::National, item_values }));
    Ok(DomainInstance { generator: GeneratorKind::Gsvm, seed, m, n, bidders })
}

/// 2-wise instance: item weights `U[0,10]`; each pair independently carries a
/// synergy `U[-3,6]` with probability 0.25.
pub fn generate_twowise(seed: u64, m: usize, n: usize) -> Result<DomainInstance> {
    if !(1..=64).contains(&m) || n < 1 {
        return Err(Error::InvalidParameter("2-wise needs 1 <= m <= 64 and n >= 1".into()));
    }
    let mut rng = Stream::new(seed, "domain/twowise", 0);
    let mut bidders = Vec::with_capacity(n);
    for _ in 0..n {
        let weights: Vec<f64> = (0..m).map(|_| rng.uniform_range(0.0, 10.0)).collect();
        let mut pairs = Vec::new();
        for j in 0..m {
            for k in j + 1..m {
                if rng.bernoulli(0.25) {
                    pairs.push((j, k, rng.uniform_range(-3.0, 6.0)));
                }
            }
        }
        bidders.push(BidderValuation::TwoWise(TwoWiseBidder { weights, pairs }));
    }
    Ok(DomainInstance { generator: GeneratorKind::TwoWise, seed, m, n, bidders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gsvm_layout() {
        let d = generate_gsvm(3, 12, 5).unwrap();
        assert_eq!(d.n, 5);
        let interests: Vec<u64> = d
            .bidders
            .iter()
            .map(|b| match b {
                BidderValuation::Gsvm(g) => g.interest(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(interests[0], 0b0000_0000_1111);
        assert_eq!(interests[1], 0b0000_0111_1000);
        assert_eq!(interests[3], 0b1110_0000_0001);
        assert_eq!(interests[4], 0b0000_1111_1111);
        assert_eq!(d.bidder_by_role("national").unwrap(), 4);
        assert_eq!(d.bidder_by_role("regional").unwrap(), 0);
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(generate_gsvm(9, 10, 4).unwrap(), generate_gsvm(9, 10, 4).unwrap());
        assert_eq!(generate_twowise(9, 8, 3).unwrap(), generate_twowise(9, 8, 3).unwrap());
        assert_ne!(generate_twowise(9, 8, 3).unwrap(), generate_twowise(10, 8, 3).unwrap());
    }
}
