//! Auction outcomes shared by MLCA and the clock auction.

use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cca::CcaTrace;
use crate::mlca::{vcg_nearest_payments, MlcaTrace};
use crate::{vcg_payments_on_reports, Allocation, Error, Payments, ReportSet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaymentRule {
    Vcg,
    VcgNearest,
}

impl PaymentRule {
    pub fn name(&self) -> &'static str {
        match self {
            PaymentRule::Vcg => "vcg",
            PaymentRule::VcgNearest => "vcg-nearest",
        }
    }
}

/// Final allocation and payments on the reports under a payment rule.
pub fn settle(reports: &[ReportSet], m: usize, rule: PaymentRule) -> Result<(Allocation, Payments)> {
    let vcg = vcg_payments_on_reports(reports, m);
    let payments = match rule {
        PaymentRule::Vcg => vcg.payments,
        PaymentRule::VcgNearest => vcg_nearest_payments(reports, m)?,
    };
    Ok((vcg.allocation, payments))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "lowercase")]
pub enum Trace {
    Mlca(MlcaTrace),
    Cca(CcaTrace),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub allocation: Allocation,
    pub payments: Payments,
    pub payment_rule: PaymentRule,
    pub rounds: usize,
    /// All bids collected, per bidder.
    pub reports: Vec<ReportSet>,
    pub trace: Trace,
}

impl AuctionOutcome {
    pub fn revenue(&self) -> f64 {
        self.payments.revenue()
    }

    /// Checks feasibility, no-deficit (`p_i ≥ 0`) and individual rationality
    /// at reported values (`v̂_i(a_i) - p_i ≥ 0`), with tolerance `1e-9`.
    pub fn check_ir_no_deficit(&self) -> Result<()> {
        if !self.allocation.is_feasible() {
            return Err(Error::Invariant("infeasible final allocation".into()));
        }
        for (i, r) in self.reports.iter().enumerate() {
            let p = self.payments.get(i);
            let b = self.allocation.bundle(i);
            let v = r
                .get(&b)
                .ok_or_else(|| Error::UndefinedReport { bidder: i, bundle: b.to_string() })?;
            if p < -crate::WELFARE_TOL {
                return Err(Error::Invariant(alloc::format!("bidder {i} has negative payment {p}")));
            }
            if v - p < -crate::WELFARE_TOL {
                return Err(Error::Invariant(alloc::format!("bidder {i} pays {p} above its bid {v}")));
            }
        }
        Ok(())
    }
}
