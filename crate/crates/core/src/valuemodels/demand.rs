use alloc::string::ToString;

use super::BidderValuation;
use crate::bundle::bit_iter;
use crate::{Bundle, Error, Result, WELFARE_TOL};

/// Demand is computed by enumeration over the relevant items; beyond this many
/// relevant items the call fails with a capability error.
pub const MAX_DEMAND_ITEMS: usize = 22;

/// `v(x) - Σ_{j∈x} p_j`.
pub fn bundle_profit(v: &BidderValuation, bits: u64, prices: &[f64]) -> f64 {
    v.value_bits(bits) - bit_iter(bits).map(|j| prices[j]).sum::<f64>()
}

/// Profit-maximizing bundle at linear prices; ties go to the
/// lexicographically smallest bundle, and the empty bundle (profit 0) is
/// always a candidate.
pub fn true_demand(v: &BidderValuation, prices: &[f64]) -> Result<Bundle> {
    let m = v.num_items();
    if prices.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: prices.len() });
    }
    let rel = v.relevant_items();
    if rel.count_ones() as usize > MAX_DEMAND_ITEMS {
        return Err(Error::Capability(
            ["demand enumeration over more than ", &MAX_DEMAND_ITEMS.to_string(), " items"].concat(),
        ));
    }
    let mut best_bits = 0u64;
    let mut best = 0.0;
    let mut s = rel;
    while s != 0 {
        let p = bundle_profit(v, s, prices);
        let key = crate::bundle::lex_key(s, m);
        let best_key = crate::bundle::lex_key(best_bits, m);
        if p > best + WELFARE_TOL || (p >= best - WELFARE_TOL && key < best_key) {
            best = p;
            best_bits = s;
        }
        s = (s - 1) & rel;
    }
    Ok(Bundle::from_bits(m, best_bits))
}
