//! Measurements tied to the efficiency guarantees: learned-WDP error bounds
//! per round and certification of learned values as approximate clearing prices.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::learning::LearnedValuation;
use crate::mlca::{MlcaTrace, Provenance};
use crate::valuemodels::DomainInstance;
use crate::wdp::{oracle_optimum, solve, SolveLimits, SolveStatus, WdpModels, WdpProblem};
use crate::{Allocation, EconomyIndex, Error, Result};

/// Demand sets are enumerated, so certification is limited to this many items.
pub const MAX_CERTIFY_ITEMS: usize = 12;

/// Per-bidder bundle prices `π_i`, given as value models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceProfile {
    pub prices: Vec<LearnedValuation>,
}

impl PriceProfile {
    pub fn new(prices: Vec<LearnedValuation>) -> Self {
        PriceProfile { prices }
    }

    /// `π_i(x) - π_i(∅)`. Subsidies are unchanged by per-bidder constant
    /// shifts, so models with a nonzero prediction at `∅` are normalised.
    pub fn price(&self, i: usize, x: &crate::Bundle) -> f64 {
        self.prices[i].predict(x) - self.prices[i].predict(&crate::Bundle::empty(x.width()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClearingCertificate {
    pub allocation: Allocation,
    /// Subsidy bidder `i` needs for its bundle to be in its demand set.
    pub beta: Vec<f64>,
    /// Subsidy the seller needs for the allocation to maximise revenue.
    pub gamma: f64,
    pub delta: f64,
}

/// Exact subsidies making `prices` clearing for `allocation` under the true values.
pub fn certify_clearing(
    prices: &PriceProfile,
    allocation: &Allocation,
    domain: &DomainInstance,
) -> Result<ClearingCertificate> {
    let (n, m) = (domain.n, domain.m);
    if m > MAX_CERTIFY_ITEMS {
        return Err(Error::Capability(alloc::format!("certification enumerates bundles; at most {MAX_CERTIFY_ITEMS} items")));
    }
    if prices.prices.len() != n || allocation.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: prices.prices.len().min(allocation.n()) });
    }
    let beta: Vec<f64> = (0..n)
        .map(|i| {
            let surplus = |x: &crate::Bundle| domain.value(i, x) - prices.price(i, x);
            let best = crate::Bundle::all(m).map(|x| surplus(&x)).fold(f64::NEG_INFINITY, f64::max);
            (best - surplus(&allocation.bundle(i))).max(0.0)
        })
        .collect();

    let models = WdpModels::new(prices.prices.clone(), m);
    let revenue = |a: &Allocation| (0..n).map(|i| prices.price(i, &a.bundle(i))).sum::<f64>();
    let best = solve(&WdpProblem::new(&models, EconomyIndex::main(n)).with_limits(SolveLimits::unlimited()))?;
    if best.status != SolveStatus::Optimal {
        return Err(Error::Invariant("revenue maximisation did not finish".into()));
    }
    let gamma = (revenue(&best.allocation) - revenue(allocation)).max(0.0);
    let delta = beta.iter().sum::<f64>() + gamma;
    Ok(ClearingCertificate { allocation: allocation.clone(), beta, gamma, delta })
}

/// `max_i max_x |ṽ_i(x) - v_i(x)|` over all bundles.
pub fn uniform_error(models: &[LearnedValuation], domain: &DomainInstance) -> Result<f64> {
    if domain.m > MAX_CERTIFY_ITEMS {
        return Err(Error::Capability(alloc::format!("uniform error enumerates bundles; at most {MAX_CERTIFY_ITEMS} items")));
    }
    let mut worst = 0.0f64;
    for (i, model) in models.iter().enumerate() {
        for x in crate::Bundle::all(domain.m) {
            worst = worst.max((model.predict(&x) - domain.value(i, &x)).abs());
        }
    }
    Ok(worst)
}

/// Error of the learned optimum in one economy of one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub round: usize,
    pub economy: Provenance,
    /// `max_i |ṽ_i(ã_i) - v_i(ã_i)|` over the economy.
    pub delta1: f64,
    /// `max_i |ṽ_i(a*_i) - v_i(a*_i)|` over the economy.
    pub delta2: f64,
    /// `1 - V(ã)/V(a*)`.
    pub eff_loss: f64,
    /// `|I|(δ₁+δ₂)/V(a*)`.
    pub bound: f64,
    pub slack: f64,
    /// Whether `ã` was proven optimal for the learned values.
    pub optimal: bool,
    /// Subsidy total of `π = ṽ` at `ã` (main economy, small `m` only).
    pub clearing_delta: Option<f64>,
    /// `|I|(δ₁′+δ₁)` with `δ₁′` the uniform error over all bundles.
    pub clearing_bound: Option<f64>,
}

/// Recomputes the efficiency-loss bound for every query-module call in a trace.
/// Marginal calls restricted to one bidder are skipped, as are repeated calls
/// for the same economy within a round.
pub fn bound_report(trace: &MlcaTrace, domain: &DomainInstance) -> Result<Vec<BoundRecord>> {
    let n = domain.n;
    let mut optima: Vec<(u64, crate::wdp::WdpSolution)> = Vec::new();
    let mut out = Vec::new();
    for round in &trace.rounds {
        let mut seen = Vec::new();
        for e in &round.economies {
            if e.for_bidder.is_some() || seen.contains(&e.economy.mask()) || e.economy.is_empty() {
                continue;
            }
            seen.push(e.economy.mask());
            let star = match optima.iter().find(|(k, _)| *k == e.economy.mask()) {
                Some((_, s)) => s.clone(),
                None => {
                    let s = oracle_optimum(domain, &e.economy, None)?;
                    optima.push((e.economy.mask(), s.clone()));
                    s
                }
            };
            let models = &round.models;
            let err = |a: &Allocation| {
                e.economy
                    .members()
                    .map(|i| (models[i].predict(&a.bundle(i)) - domain.value(i, &a.bundle(i))).abs())
                    .fold(0.0, f64::max)
            };
            let delta1 = err(&e.learned_allocation);
            let delta2 = err(&star.allocation);
            let v_star = star.objective;
            let v_learned: f64 = e.economy.members().map(|i| domain.value(i, &e.learned_allocation.bundle(i))).sum();
            let (eff_loss, bound) = if v_star > 0.0 {
                (1.0 - v_learned / v_star, e.economy.len() as f64 * (delta1 + delta2) / v_star)
            } else {
                (0.0, 0.0)
            };
            let (clearing_delta, clearing_bound) = if e.economy.is_main() && domain.m <= MAX_CERTIFY_ITEMS {
                let cert = certify_clearing(&PriceProfile::new(models.clone()), &e.learned_allocation, domain)?;
                let all = uniform_error(models, domain)?;
                (Some(cert.delta), Some(n as f64 * (all + delta1)))
            } else {
                (None, None)
            };
            out.push(BoundRecord {
                round: round.round,
                economy: e.provenance,
                delta1,
                delta2,
                eff_loss,
                bound,
                slack: bound - eff_loss,
                optimal: e.status == SolveStatus::Optimal,
                clearing_delta,
                clearing_bound,
            });
        }
    }
    Ok(out)
}
