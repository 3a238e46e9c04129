use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{next_queries, train_models, MlcaConfig, QueryProfile, WelfareOracle};
use crate::learning::LearnedValuation;
use crate::outcome::settle;
use crate::rng::Stream;
use crate::valuemodels::{answer_query, BidderStrategy, DomainInstance};
use crate::wdp::{SolveStatus, Stopwatch, WdpModels, WdpProblem};
use crate::{AuctionOutcome, Bundle, BundleValueReport, EconomyIndex, Error, ReportSet, Result, Trace};

/// Where a query came from. Recorded in the trace, never shown to bidders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Push,
    Initial,
    Main,
    /// The marginal economy without the given bidder.
    Marginal(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub bundle: Bundle,
    pub value: f64,
    pub provenance: Provenance,
}

/// One call of the query module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EconomyRecord {
    pub provenance: Provenance,
    pub economy: EconomyIndex,
    /// Set when only this bidder's query was kept (sampled marginal economies).
    pub for_bidder: Option<usize>,
    pub learned_allocation: crate::Allocation,
    pub learned_welfare: f64,
    pub bound: f64,
    pub status: SolveStatus,
    pub restricted_solves: usize,
    pub nodes: u64,
    /// Queries taken from this call, per bidder.
    pub queries: Vec<Option<Bundle>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlcaRound {
    pub round: usize,
    /// Models trained on the reports at the start of the round.
    pub models: Vec<LearnedValuation>,
    pub economies: Vec<EconomyRecord>,
    /// Queries per bidder in delivery order, with the answers.
    pub queries: Vec<Vec<QueryRecord>>,
    pub wd_nodes: u64,
    pub solve_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlcaTrace {
    /// Push bids and initial queries, per bidder.
    pub initial: Vec<Vec<QueryRecord>>,
    pub rounds: Vec<MlcaRound>,
}

impl MlcaTrace {
    pub fn wd_nodes(&self) -> u64 {
        self.rounds.iter().map(|r| r.wd_nodes).sum()
    }

    pub fn solve_seconds(&self) -> f64 {
        self.rounds.iter().map(|r| r.solve_seconds).sum()
    }
}

/// Hooks into a running auction.
pub trait MlcaObserver {
    /// Called with the unrestricted learned WDP of every query-module call.
    fn on_problem(&mut self, _round: usize, _provenance: Provenance, _problem: &WdpProblem<'_>) {}
}

struct NoObserver;
impl MlcaObserver for NoObserver {}

/// Runs MLCA. `push_bids` is either empty or holds one list per bidder.
pub fn run_mlca(
    domain: &DomainInstance,
    strategies: &[BidderStrategy],
    cfg: &MlcaConfig,
    push_bids: &[Vec<BundleValueReport>],
) -> Result<AuctionOutcome> {
    run_mlca_observed(domain, strategies, cfg, push_bids, &mut NoObserver)
}

pub fn run_mlca_observed(
    domain: &DomainInstance,
    strategies: &[BidderStrategy],
    cfg: &MlcaConfig,
    push_bids: &[Vec<BundleValueReport>],
    observer: &mut dyn MlcaObserver,
) -> Result<AuctionOutcome> {
    let (n, m) = (domain.n, domain.m);
    cfg.validate(n)?;
    if strategies.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: strategies.len() });
    }
    if !push_bids.is_empty() && push_bids.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: push_bids.len() });
    }
    for s in strategies {
        if let BidderStrategy::Overbid { z } = s {
            if !(0.0..1.0).contains(z) {
                return Err(Error::InvalidParameter(alloc::format!("overbid factor {z} outside [0, 1)")));
            }
        }
    }
    let oracle = strategies.iter().any(|s| s.needs_welfare_oracle()).then(|| WelfareOracle::new(domain));
    let ask = |i: usize, b: &Bundle, v_r: f64| -> Result<f64> {
        let v_t = match &oracle {
            Some(o) if strategies[i].needs_welfare_oracle() => o.with_bundle(i, b)?,
            _ => 0.0,
        };
        Ok(answer_query(&strategies[i], &domain.bidders[i], b, v_r, v_t))
    };
    let v_r_of = |reports: &[ReportSet]| oracle.as_ref().map_or(0.0, |o| o.reported_restricted(reports));

    let mut reports = alloc::vec![ReportSet::new(); n];
    let mut initial: Vec<Vec<QueryRecord>> = alloc::vec![Vec::new(); n];
    let mut asked = alloc::vec![0usize; n];
    for (i, bids) in push_bids.iter().enumerate() {
        if bids.len() > cfg.p_max {
            return Err(Error::InvalidParameter(alloc::format!("bidder {i} sent more than {} push bids", cfg.p_max)));
        }
        for b in bids {
            reports[i].push(*b)?;
            initial[i].push(QueryRecord { bundle: b.bundle, value: b.value, provenance: Provenance::Push });
        }
    }

    let v_r = v_r_of(&reports);
    for i in 0..n {
        let bundles = match &cfg.initial_queries {
            Some(q) => q[i].clone(),
            None => sample_initial(m, cfg.q_init, &reports[i], &mut Stream::new(cfg.seed, "mlca/initial", i as u64))?,
        };
        for b in bundles {
            if b.width() != m {
                return Err(Error::DimensionMismatch { expected: m, found: b.width() });
            }
            if reports[i].contains(&b) {
                return Err(Error::DuplicateReport(b.to_bit_string()));
            }
            let value = ask(i, &b, v_r)?;
            reports[i].insert(b, value)?;
            asked[i] += 1;
            initial[i].push(QueryRecord { bundle: b, value, provenance: Provenance::Initial });
        }
    }

    let mut rounds = Vec::new();
    for t in 1..=cfg.rounds() {
        let watch = Stopwatch::start();
        let models = train_models(domain, &reports, cfg)?;
        let mut generated: Vec<Vec<Bundle>> = alloc::vec![Vec::new(); n];
        let mut tags: Vec<Vec<Provenance>> = alloc::vec![Vec::new(); n];
        let mut economies = Vec::new();
        let mut wd_nodes = 0;
        let mut call = |economy: EconomyIndex,
                        provenance: Provenance,
                        only: Option<usize>,
                        generated: &mut Vec<Vec<Bundle>>,
                        tags: &mut Vec<Vec<Provenance>>|
         -> Result<()> {
            observer.on_problem(t, provenance, &WdpProblem::new(&models, economy).with_limits(cfg.limits));
            let profile = next_queries(&economy, &reports, generated, &models, &cfg.limits)?;
            let kept = keep(&profile, only);
            for (i, q) in kept.iter().enumerate() {
                if let Some(q) = q {
                    generated[i].push(*q);
                    tags[i].push(provenance);
                }
            }
            wd_nodes += profile.nodes;
            economies.push(record(profile, provenance, only, kept, &models));
            Ok(())
        };

        let mut marginal_rng = Stream::new(cfg.seed, "mlca/marginals", t as u64);
        if cfg.q_round >= n {
            for _ in 0..cfg.q_round / n {
                call(EconomyIndex::main(n), Provenance::Main, None, &mut generated, &mut tags)?;
                for j in 0..n {
                    if n > 1 {
                        call(EconomyIndex::marginal(n, j), Provenance::Marginal(j), None, &mut generated, &mut tags)?;
                    }
                }
            }
            let rem = cfg.q_round % n;
            for i in 0..n {
                for j in sample_others(n, i, rem, &mut marginal_rng) {
                    call(EconomyIndex::marginal(n, j), Provenance::Marginal(j), Some(i), &mut generated, &mut tags)?;
                }
            }
        } else {
            for i in 0..n {
                for j in sample_others(n, i, cfg.q_round - 1, &mut marginal_rng) {
                    call(EconomyIndex::marginal(n, j), Provenance::Marginal(j), Some(i), &mut generated, &mut tags)?;
                }
            }
            call(EconomyIndex::main(n), Provenance::Main, None, &mut generated, &mut tags)?;
        }

        let v_r = v_r_of(&reports);
        let mut delivery = Stream::new(cfg.seed, "mlca/delivery", t as u64);
        let mut answered: Vec<Vec<QueryRecord>> = alloc::vec![Vec::new(); n];
        for i in 0..n {
            let mut order: Vec<usize> = (0..generated[i].len()).collect();
            delivery.shuffle(&mut order);
            for k in order {
                let b = generated[i][k];
                let value = ask(i, &b, v_r)?;
                answered[i].push(QueryRecord { bundle: b, value, provenance: tags[i][k] });
            }
        }
        for i in 0..n {
            for q in &answered[i] {
                reports[i].insert(q.bundle, q.value)?;
                asked[i] += 1;
            }
            if asked[i] > cfg.q_max {
                return Err(Error::Invariant(alloc::format!("bidder {i} answered {} > q_max queries", asked[i])));
            }
        }
        rounds.push(MlcaRound {
            round: t,
            models: models.into_models(),
            economies,
            queries: answered,
            wd_nodes,
            solve_seconds: watch.seconds(),
        });
    }

    let (allocation, payments) = settle(&reports, m, cfg.payment_rule)?;
    Ok(AuctionOutcome {
        allocation,
        payments,
        payment_rule: cfg.payment_rule,
        rounds: rounds.len(),
        reports,
        trace: Trace::Mlca(MlcaTrace { initial, rounds }),
    })
}

fn keep(profile: &QueryProfile, only: Option<usize>) -> Vec<Option<Bundle>> {
    match only {
        None => profile.queries.clone(),
        Some(i) => (0..profile.queries.len()).map(|k| if k == i { profile.queries[k] } else { None }).collect(),
    }
}

fn record(
    profile: QueryProfile,
    provenance: Provenance,
    only: Option<usize>,
    queries: Vec<Option<Bundle>>,
    models: &WdpModels,
) -> EconomyRecord {
    let learned_welfare = profile.economy.members().map(|i| models.models()[i].predict(&profile.learned.allocation.bundle(i))).sum();
    EconomyRecord {
        provenance,
        economy: profile.economy,
        for_bidder: only,
        learned_allocation: profile.learned.allocation,
        learned_welfare,
        bound: profile.learned.bound,
        status: profile.learned.status,
        restricted_solves: profile.restricted_solves,
        nodes: profile.nodes,
        queries,
    }
}

/// `k` distinct bidders other than `i`, uniformly without replacement.
fn sample_others(n: usize, i: usize, k: usize, rng: &mut Stream) -> Vec<usize> {
    let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let k = k.min(others.len());
    for s in 0..k {
        let r = s + rng.below((others.len() - s) as u64) as usize;
        others.swap(s, r);
    }
    others.truncate(k);
    others
}

/// `count` distinct uniform nonempty bundles not already in `existing`.
fn sample_initial(m: usize, count: usize, existing: &ReportSet, rng: &mut Stream) -> Result<Vec<Bundle>> {
    let available = if m >= 63 { usize::MAX } else { (1usize << m) - 1 - existing.len() };
    if count > available {
        return Err(Error::DomainTooSmall(alloc::format!(
            "{count} initial queries requested but only {available} nonempty bundles are available"
        )));
    }
    if m <= 20 {
        let mut pool: Vec<u64> = (1..1u64 << m).filter(|&b| !existing.contains(&Bundle::from_bits(m, b))).collect();
        for s in 0..count {
            let r = s + rng.below((pool.len() - s) as u64) as usize;
            pool.swap(s, r);
        }
        return Ok(pool[..count].iter().map(|&b| Bundle::from_bits(m, b)).collect());
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let mask = crate::bundle::mask(m);
    while out.len() < count {
        let b = rng.next_u64() & mask;
        let bundle = Bundle::from_bits(m, b);
        if b != 0 && !existing.contains(&bundle) && seen.insert(b) {
            out.push(bundle);
        }
    }
    Ok(out)
}

/// Reruns an auction from its inputs and checks that it reproduces `expected`.
pub fn replay(
    domain: &DomainInstance,
    strategies: &[BidderStrategy],
    cfg: &MlcaConfig,
    push_bids: &[Vec<BundleValueReport>],
    expected: &AuctionOutcome,
) -> Result<AuctionOutcome> {
    let out = run_mlca(domain, strategies, cfg, push_bids)?;
    if out.reports != expected.reports || out.allocation != expected.allocation || out.payments != expected.payments {
        return Err(Error::Invariant("replay diverged from the recorded outcome".into()));
    }
    Ok(out)
}
