use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MlcaConfig;
use crate::learning::train;
use crate::valuemodels::DomainInstance;
use crate::wdp::{solve, SolveLimits, SolveStatus, WdpModels, WdpProblem, WdpSolution};
use crate::{Bundle, EconomyIndex, ReportSet, Result};

/// One query per economy member, produced by a single call of the query module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryProfile {
    pub economy: EconomyIndex,
    /// `None` for non-members and for bidders who have reported every bundle.
    pub queries: Vec<Option<Bundle>>,
    /// Unrestricted learned-welfare maximiser `ã` and its solver report.
    pub learned: WdpSolution,
    /// Number of extra solves with exclusion constraints.
    pub restricted_solves: usize,
    /// Search nodes over all solves of this call.
    pub nodes: u64,
}

/// Trains one value model per bidder on its reports.
pub fn train_models(domain: &DomainInstance, reports: &[ReportSet], cfg: &MlcaConfig) -> Result<WdpModels> {
    let models = reports
        .iter()
        .enumerate()
        .map(|(i, r)| train(cfg.learner_for(i), r, domain.m, &domain.bidders[i]))
        .collect::<Result<Vec<_>>>()?;
    Ok(WdpModels::new(models, domain.m))
}

fn exhausted(m: usize, reports: &ReportSet, generated: &[Bundle]) -> bool {
    m < 63 && reports.len() + generated.len() + 1 >= (1usize << m)
}

/// The ML-based query module for one economy.
///
/// Solves the learned WDP for `economy`. Each member whose bundle in the
/// solution is new (not in `reports[i]` or `generated[i]`) is asked for it.
/// The remaining members are handled in index order: each adds the exclusion
/// of its reported and generated bundles and of `∅` to the constraints of the
/// stale members before it, and is asked for its bundle in the re-solved WDP.
/// If the accumulated exclusions are infeasible, that member is re-solved with
/// only its own exclusions.
pub fn next_queries(
    economy: &EconomyIndex,
    reports: &[ReportSet],
    generated: &[Vec<Bundle>],
    models: &WdpModels,
    limits: &SolveLimits,
) -> Result<QueryProfile> {
    let n = reports.len();
    let m = models.m();
    let base = WdpProblem::new(models, *economy).with_limits(*limits);
    let learned = solve(&base)?;
    let mut nodes = learned.nodes;
    let mut queries = alloc::vec![None; n];
    let mut stale = Vec::new();
    for i in economy.members() {
        if exhausted(m, &reports[i], &generated[i]) {
            continue;
        }
        let q = learned.allocation.bundle(i);
        if q.is_empty() || reports[i].contains(&q) || generated[i].contains(&q) {
            stale.push(i);
        } else {
            queries[i] = Some(q);
        }
    }

    let mut restricted_solves = 0;
    let mut cumulative: Vec<Vec<Bundle>> = alloc::vec![Vec::new(); n];
    for &i in &stale {
        let mut own: Vec<Bundle> = reports[i].bundles().chain(generated[i].iter().copied()).collect();
        own.push(Bundle::empty(m));
        let mut trial = cumulative.clone();
        trial[i] = own.clone();
        let sol = solve(&WdpProblem::new(models, *economy).with_limits(*limits).with_exclusions(trial.clone()))?;
        restricted_solves += 1;
        nodes += sol.nodes;
        let usable = |s: &WdpSolution| s.status != SolveStatus::Infeasible && !s.empty_fallback;
        let q = if usable(&sol) {
            cumulative = trial;
            sol.allocation.bundle(i)
        } else {
            let mut solo = alloc::vec![Vec::new(); n];
            solo[i] = own.clone();
            let sol = solve(&WdpProblem::new(models, *economy).with_limits(*limits).with_exclusions(solo))?;
            restricted_solves += 1;
            nodes += sol.nodes;
            if usable(&sol) {
                sol.allocation.bundle(i)
            } else {
                // only reachable when a limit stops the search without an incumbent
                first_unqueried(m, &own).unwrap_or_else(|| Bundle::empty(m))
            }
        };
        queries[i] = if q.is_empty() || own.contains(&q) { first_unqueried(m, &own) } else { Some(q) };
    }
    Ok(QueryProfile { economy: *economy, queries, learned, restricted_solves, nodes })
}

fn first_unqueried(m: usize, seen: &[Bundle]) -> Option<Bundle> {
    Bundle::all(m).find(|b| !b.is_empty() && !seen.contains(b))
}
