//! Winner determination over learned value models.
//!
//! [`solve`] dispatches to an exact best-first branch-and-bound over item
//! assignments ([`solve_linear_ip`], [`solve_quadratic`],
//! [`solve_kernel_generic`]) or to brute-force enumeration
//! ([`solve_enumeration`]). Exclusions forbid specific bundles per bidder and
//! act as integer cuts.

mod bnb;
pub(crate) mod clock;
mod encoding;
mod enumerate;
mod lp;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::learning::{KernelSpec, LearnedValuation};
use crate::valuemodels::DomainInstance;
use crate::{Allocation, Bundle, EconomyIndex, Error, Result};

pub use clock::Stopwatch;
pub use encoding::{Encoding, KernelTerms};
pub use enumerate::MAX_ENUMERATION_STATES;
pub use lp::to_lp_format;

/// Time and node budgets. `None` means unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveLimits {
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { time_limit: Some(60.0), node_limit: None }
    }
}

impl SolveLimits {
    pub fn unlimited() -> Self {
        SolveLimits { time_limit: None, node_limit: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    TimeoutFeasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WdpSolution {
    pub allocation: Allocation,
    /// Learned welfare of `allocation`.
    pub objective: f64,
    /// Proven upper bound on the optimum.
    pub bound: f64,
    pub status: SolveStatus,
    pub nodes: u64,
    /// Set when a limit was hit before any incumbent was found and the empty
    /// allocation was returned in its place.
    pub empty_fallback: bool,
}

impl WdpSolution {
    /// `(ō - o̲)/o̲`, or the absolute gap with `true` when `o̲ ≤ 0`.
    pub fn gap(&self) -> (f64, bool) {
        let diff = (self.bound - self.objective).max(0.0);
        if self.objective > 0.0 {
            (diff / self.objective, false)
        } else {
            (diff, true)
        }
    }
}

/// Learned models together with their solver encodings.
#[derive(Clone, Debug)]
pub struct WdpModels {
    m: usize,
    models: Vec<LearnedValuation>,
    encodings: Vec<Encoding>,
}

impl WdpModels {
    pub fn new(models: Vec<LearnedValuation>, m: usize) -> Self {
        let encodings = models.iter().map(|mo| Encoding::from_model(mo, m)).collect();
        WdpModels { m, models, encodings }
    }

    /// Oracle models wrapping the domain's true valuations.
    pub fn oracle(domain: &DomainInstance) -> Self {
        Self::new(domain.bidders.iter().cloned().map(LearnedValuation::Oracle).collect(), domain.m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.models.len()
    }

    pub fn models(&self) -> &[LearnedValuation] {
        &self.models
    }

    pub fn into_models(self) -> Vec<LearnedValuation> {
        self.models
    }

    pub fn encodings(&self) -> &[Encoding] {
        &self.encodings
    }
}

/// One winner determination instance.
#[derive(Clone, Debug)]
pub struct WdpProblem<'a> {
    pub models: &'a WdpModels,
    pub economy: EconomyIndex,
    /// Forbidden bundles per bidder (indexed by bidder; may be shorter than `n`).
    pub exclusions: Vec<Vec<Bundle>>,
    /// Items that may not be allocated to anyone.
    pub blocked: u64,
    pub limits: SolveLimits,
}

impl<'a> WdpProblem<'a> {
    pub fn new(models: &'a WdpModels, economy: EconomyIndex) -> Self {
        WdpProblem { models, economy, exclusions: Vec::new(), blocked: 0, limits: SolveLimits::default() }
    }

    pub fn with_exclusions(mut self, exclusions: Vec<Vec<Bundle>>) -> Self {
        self.exclusions = exclusions;
        self
    }

    pub fn with_limits(mut self, limits: SolveLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_blocked(mut self, blocked: Bundle) -> Self {
        self.blocked = blocked.bits();
        self
    }

    fn validate(&self) -> Result<()> {
        if self.economy.n() != self.models.n() {
            return Err(Error::DimensionMismatch { expected: self.models.n(), found: self.economy.n() });
        }
        for ex in &self.exclusions {
            for b in ex {
                if b.width() != self.models.m() {
                    return Err(Error::DimensionMismatch { expected: self.models.m(), found: b.width() });
                }
            }
        }
        Ok(())
    }

    /// Sorted excluded masks for bidder `i`.
    pub(crate) fn excluded_masks(&self, i: usize) -> Vec<u64> {
        let mut v: Vec<u64> = self.exclusions.get(i).map_or(Vec::new(), |e| e.iter().map(|b| b.bits()).collect());
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Whether `a` violates any exclusion of an economy member.
    pub fn violates_exclusions(&self, a: &Allocation) -> bool {
        self.economy.members().any(|i| {
            self.exclusions.get(i).is_some_and(|ex| ex.iter().any(|b| *b == a.bundle(i)))
        })
    }

    /// Learned welfare of an allocation, via the models' predictions.
    pub fn learned_welfare(&self, a: &Allocation) -> f64 {
        self.economy.members().map(|i| self.models.models[i].predict(&a.bundle(i))).sum()
    }
}

/// Brute-force optimum over all item-to-bidder assignments.
pub fn solve_enumeration(p: &WdpProblem) -> Result<WdpSolution> {
    p.validate()?;
    enumerate::solve(p)
}

fn check_kinds(p: &WdpProblem, ok: impl Fn(&LearnedValuation) -> bool, what: &str) -> Result<()> {
    p.validate()?;
    for i in p.economy.members() {
        let model = &p.models.models[i];
        if !ok(model) {
            return Err(Error::ModelKind(alloc::format!("{what} solver got a {} model", model.kind_name())));
        }
    }
    Ok(())
}

/// Linear models (or linear-kernel SVRs) via branch-and-bound whose bound is
/// the LP relaxation of the assignment IP.
pub fn solve_linear_ip(p: &WdpProblem) -> Result<WdpSolution> {
    check_kinds(
        p,
        |mo| match mo {
            LearnedValuation::Linear(_) => true,
            LearnedValuation::Svr(s) => s.kernel == KernelSpec::Linear,
            _ => false,
        },
        "linear IP",
    )?;
    bnb::solve(p)
}

/// Quadratic-kernel SVRs: boolean quadratic program by branch-and-bound.
pub fn solve_quadratic(p: &WdpProblem) -> Result<WdpSolution> {
    check_kinds(
        p,
        |mo| matches!(mo, LearnedValuation::Svr(s) if matches!(s.kernel, KernelSpec::Quadratic { .. })),
        "quadratic",
    )?;
    bnb::solve(p)
}

/// Exponential (dot-product) or Gaussian (RBF) kernel SVRs via the z-encoding.
pub fn solve_kernel_generic(p: &WdpProblem) -> Result<WdpSolution> {
    check_kinds(
        p,
        |mo| {
            matches!(mo, LearnedValuation::Svr(s)
                if matches!(s.kernel, KernelSpec::Exponential { .. } | KernelSpec::Gaussian { .. }))
        },
        "generic kernel",
    )?;
    bnb::solve(p)
}

/// Dispatches on model kind. Mixed kinds are solved jointly by
/// branch-and-bound; explicit value tables fall back to enumeration.
pub fn solve(p: &WdpProblem) -> Result<WdpSolution> {
    p.validate()?;
    let all_bnb = p.economy.members().all(|i| p.models.encodings[i].supports_branch_and_bound());
    if all_bnb {
        bnb::solve(p)
    } else {
        enumerate::solve(p)
    }
}

/// Exact welfare-maximizing allocation at true values over `economy`, with
/// `blocked` items withheld.
pub fn oracle_optimum(domain: &DomainInstance, economy: &EconomyIndex, blocked: Option<Bundle>) -> Result<WdpSolution> {
    let models = WdpModels::oracle(domain);
    oracle_optimum_with(&models, economy, blocked)
}

/// As [`oracle_optimum`], reusing prebuilt oracle models.
pub fn oracle_optimum_with(models: &WdpModels, economy: &EconomyIndex, blocked: Option<Bundle>) -> Result<WdpSolution> {
    let mut p = WdpProblem::new(models, *economy).with_limits(SolveLimits::unlimited());
    if let Some(b) = blocked {
        p = p.with_blocked(b);
    }
    let s = solve(&p)?;
    if s.status != SolveStatus::Optimal {
        return Err(Error::Infeasible);
    }
    Ok(s)
}
