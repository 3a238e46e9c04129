use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::BidderValuation;
use crate::{Bundle, BundleValueReport};

/// How a bidder answers value queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BidderStrategy {
    Truthful,
    /// Inflates `v(b)` by `z · max(0, V_R - V_T(b))`, where `V_R` is the best
    /// true social welfare attainable with the bundles reported so far and
    /// `V_T(b)` the best true social welfare when this bidder receives `b`.
    Overbid { z: f64 },
    /// Reports the listed values for the listed bundles, truthfully otherwise.
    Scripted { reports: Vec<BundleValueReport> },
}

impl BidderStrategy {
    pub fn needs_welfare_oracle(&self) -> bool {
        matches!(self, BidderStrategy::Overbid { z } if *z != 0.0)
    }
}

/// The reported value for query `b`. `v_r` and `v_t` are only read by the
/// overbidding strategy.
pub fn answer_query(strategy: &BidderStrategy, v: &BidderValuation, b: &Bundle, v_r: f64, v_t: f64) -> f64 {
    let truth = v.value(b);
    match strategy {
        BidderStrategy::Truthful => truth,
        BidderStrategy::Overbid { z } => truth + z * (v_r - v_t).max(0.0),
        BidderStrategy::Scripted { reports } => {
            reports.iter().find(|r| r.bundle == *b).map_or(truth, |r| r.value)
        }
    }
}
