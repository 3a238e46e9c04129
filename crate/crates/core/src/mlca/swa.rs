use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{run_mlca, MlcaConfig};
use crate::valuemodels::{BidderStrategy, DomainInstance};
use crate::{wdp_over_reports, AuctionOutcome, BundleValueReport, EconomyIndex, Result};

/// Change in reported welfare of each economy between a truthful run and a
/// manipulated run with the same seeds (manipulated minus truthful).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwaReport {
    pub main_delta: f64,
    /// Indexed by the excluded bidder.
    pub marginal_deltas: Vec<f64>,
}

impl SwaReport {
    pub fn max_abs_marginal_delta(&self) -> f64 {
        self.marginal_deltas.iter().fold(0.0, |a, d| a.max(d.abs()))
    }
}

pub fn swa_compare(truthful: &AuctionOutcome, manipulated: &AuctionOutcome, m: usize) -> SwaReport {
    let n = truthful.reports.len();
    let w = |o: &AuctionOutcome, e: &EconomyIndex| wdp_over_reports(&o.reports, e, m).welfare;
    let main = EconomyIndex::main(n);
    SwaReport {
        main_delta: w(manipulated, &main) - w(truthful, &main),
        marginal_deltas: (0..n)
            .map(|i| {
                let e = EconomyIndex::marginal(n, i);
                w(manipulated, &e) - w(truthful, &e)
            })
            .collect(),
    }
}

/// Reruns the auction with all bidders truthful and compares.
pub fn swa_diagnostic(
    outcome: &AuctionOutcome,
    domain: &DomainInstance,
    cfg: &MlcaConfig,
    push_bids: &[Vec<BundleValueReport>],
) -> Result<SwaReport> {
    let truthful = run_mlca(domain, &alloc::vec![BidderStrategy::Truthful; domain.n], cfg, push_bids)?;
    Ok(swa_compare(&truthful, outcome, domain.m))
}
