use alloc::vec::Vec;

use crate::valuemodels::DomainInstance;
use crate::wdp::{oracle_optimum_with, WdpModels};
use crate::{wdp_over_reports, Bundle, EconomyIndex, ReportSet, Result};

/// True-welfare quantities available to a manipulating bidder with full
/// information about everyone's valuations.
pub struct WelfareOracle<'d> {
    domain: &'d DomainInstance,
    models: WdpModels,
}

impl<'d> WelfareOracle<'d> {
    pub fn new(domain: &'d DomainInstance) -> Self {
        WelfareOracle { domain, models: WdpModels::oracle(domain) }
    }

    /// `V_R`: the best true social welfare among allocations that give every
    /// bidder a bundle it has already reported (or nothing).
    pub fn reported_restricted(&self, reports: &[ReportSet]) -> f64 {
        let truthful: Vec<ReportSet> = reports
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut t = ReportSet::new();
                for rep in r {
                    t.insert(rep.bundle, self.domain.bidders[i].value(&rep.bundle))
                        .expect("bundles of a valid report set are distinct and nonempty");
                }
                t
            })
            .collect();
        wdp_over_reports(&truthful, &EconomyIndex::main(self.domain.n), self.domain.m).welfare
    }

    /// `V_T(b)`: the best true social welfare when bidder `i` receives `b`.
    pub fn with_bundle(&self, i: usize, b: &Bundle) -> Result<f64> {
        let own = self.domain.bidders[i].value(b);
        if self.domain.n == 1 {
            return Ok(own);
        }
        let rest = oracle_optimum_with(&self.models, &EconomyIndex::marginal(self.domain.n, i), Some(*b))?;
        Ok(own + rest.objective)
    }
}
