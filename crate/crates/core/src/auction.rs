//! Winner determination over reported bundles, VCG payments and welfare measures.

use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::valuemodels::{BidderValuation, DomainInstance};
use crate::{Allocation, Bundle, EconomyIndex, Error, Payments, ReportSet, Result, WELFARE_TOL};

/// Reported social welfare `Σ_{i∈I} v̂_i(a_i)`.
pub fn reported_welfare(a: &Allocation, reports: &[ReportSet], economy: &EconomyIndex) -> Result<f64> {
    if a.n() != reports.len() {
        return Err(Error::DimensionMismatch { expected: reports.len(), found: a.n() });
    }
    let mut w = 0.0;
    for i in economy.members() {
        let b = a.bundle(i);
        w += reports[i]
            .get(&b)
            .ok_or_else(|| Error::UndefinedReport { bidder: i, bundle: b.to_string() })?;
    }
    Ok(w)
}

/// True social welfare `Σ_i v_i(a_i)`.
pub fn social_welfare(domain: &DomainInstance, a: &Allocation) -> f64 {
    a.bundles().iter().zip(&domain.bidders).map(|(b, v)| v.value(b)).sum()
}

/// Quasi-linear utility `v_i(a_i) - p_i`.
pub fn utility(i: usize, a: &Allocation, p: &Payments, v: &BidderValuation) -> f64 {
    v.value(&a.bundle(i)) - p.get(i)
}

/// `V(a) / V(a*)` where `a*` maximizes true social welfare.
pub fn efficiency(a: &Allocation, domain: &DomainInstance) -> Result<f64> {
    let opt = crate::wdp::oracle_optimum(domain, &EconomyIndex::main(domain.n), None)?;
    efficiency_with_optimum(a, domain, opt.objective)
}

/// Efficiency given a precomputed optimal welfare.
pub fn efficiency_with_optimum(a: &Allocation, domain: &DomainInstance, optimum: f64) -> Result<f64> {
    if optimum <= 0.0 {
        return Err(Error::DegenerateInstance);
    }
    Ok(social_welfare(domain, a) / optimum)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportedOptimum {
    pub allocation: Allocation,
    pub welfare: f64,
}

struct Search<'a> {
    members: Vec<usize>,
    // per member: (bits, lex key, value), sorted by lex key, starting with the empty bundle
    candidates: Vec<Vec<(u64, f64)>>,
    choice: Vec<usize>,
    best_choice: Vec<usize>,
    best: f64,
    _reports: &'a [ReportSet],
}

impl Search<'_> {
    fn bound(&self, k: usize, used: u64) -> f64 {
        self.candidates[k..]
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|(b, _)| b & used == 0)
                    .map(|(_, v)| *v)
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    fn dfs(&mut self, k: usize, used: u64, value: f64) {
        if k == self.members.len() {
            if value > self.best + WELFARE_TOL {
                self.best = value;
                self.best_choice.clone_from(&self.choice);
            }
            return;
        }
        if value + self.bound(k, used) <= self.best + WELFARE_TOL {
            return;
        }
        for c in 0..self.candidates[k].len() {
            let (bits, v) = self.candidates[k][c];
            if bits & used != 0 {
                continue;
            }
            self.choice[k] = c;
            self.dfs(k + 1, used | bits, value + v);
        }
    }
}

/// Exact maximizer of reported welfare over allocations in which every bidder
/// of the economy receives a reported bundle or nothing; bidders outside the
/// economy receive nothing. Ties go to the lexicographically smallest
/// allocation.
pub fn wdp_over_reports(reports: &[ReportSet], economy: &EconomyIndex, m: usize) -> ReportedOptimum {
    let members: Vec<usize> = economy.members().filter(|&i| i < reports.len()).collect();
    let candidates: Vec<Vec<(u64, f64)>> = members
        .iter()
        .map(|&i| {
            let mut c: Vec<(u64, f64)> = reports[i].iter().map(|r| (r.bundle.bits(), r.value)).collect();
            c.push((0, 0.0));
            c.sort_by_key(|(b, _)| crate::bundle::lex_key(*b, m));
            c
        })
        .collect();
    let mut s = Search {
        choice: alloc::vec![0; members.len()],
        best_choice: alloc::vec![0; members.len()],
        members,
        candidates,
        best: f64::NEG_INFINITY,
        _reports: reports,
    };
    s.dfs(0, 0, 0.0);
    let mut a = Allocation::empty(reports.len(), m);
    for (k, &i) in s.members.iter().enumerate() {
        a.set(i, Bundle::from_bits(m, s.candidates[k][s.best_choice[k]].0));
    }
    ReportedOptimum { allocation: a, welfare: s.best.max(0.0) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcgOutcome {
    pub allocation: Allocation,
    pub welfare: f64,
    pub payments: Payments,
    /// Optimal reported welfare of each marginal economy `N \ {i}`.
    pub marginal_welfare: Vec<f64>,
}

/// VCG payments `p_i = W(N\{i}) - Σ_{j≠i} v̂_j(a_j)` on the reports.
pub fn vcg_payments_on_reports(reports: &[ReportSet], m: usize) -> VcgOutcome {
    let n = reports.len();
    let main = wdp_over_reports(reports, &EconomyIndex::main(n), m);
    let mut payments = alloc::vec![0.0; n];
    let mut marginal_welfare = alloc::vec![0.0; n];
    for i in 0..n {
        let own = reports[i].get(&main.allocation.bundle(i)).unwrap_or(0.0);
        let w = if n == 1 { 0.0 } else { wdp_over_reports(reports, &EconomyIndex::marginal(n, i), m).welfare };
        marginal_welfare[i] = w;
        payments[i] = (w - (main.welfare - own)).max(0.0);
    }
    VcgOutcome { allocation: main.allocation, welfare: main.welfare, payments: Payments(payments), marginal_welfare }
}
