use std::path::PathBuf;

use anyhow::{ensure, Context};
use mlca_core::auction::efficiency_with_optimum;
use mlca_core::cca::run_cca;
use mlca_core::learning::{default_error_sample, learning_error, train};
use mlca_core::mlca::{nearest_core_point, run_mlca_observed, vcg_nearest_payments, MlcaObserver, MlcaTrace, Provenance};
use mlca_core::rng::Stream;
use mlca_core::valuemodels::{BidderStrategy, DomainInstance};
use mlca_core::wdp::{oracle_optimum, to_lp_format, WdpProblem};
use mlca_core::{social_welfare, Allocation, AuctionOutcome, Bundle, EconomyIndex, PaymentRule, Trace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mechanism};
use crate::formats::{write_clock_csv, write_json, ReplayFile};
use crate::stats::{mean, std_err};

/// Optional side outputs of a batch.
#[derive(Clone, Debug, Default)]
pub struct Hooks {
    /// Per-seed replay files (MLCA) and clock traces (CCA).
    pub trace_dir: Option<PathBuf>,
    /// LP files of every main-economy learned WDP.
    pub lp_dir: Option<PathBuf>,
}

/// One mechanism on one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub mechanism: String,
    pub ml: String,
    pub heuristic: String,
    pub payment: String,
    pub efficiency: f64,
    /// Revenue as a fraction of the optimal social welfare.
    pub revenue: f64,
    /// Revenue under VCG-nearest payments on the same bids.
    pub revenue_core: Option<f64>,
    pub rounds: usize,
    pub learning_error: Option<f64>,
    pub wd_nodes: Option<u64>,
    pub wd_solve_time: Option<f64>,
    pub optimality_gap: Option<f64>,
}

/// Aggregate over seeds for one mechanism configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub mechanism: String,
    pub ml: String,
    pub heuristic: String,
    pub payment: String,
    pub seeds: usize,
    pub efficiency: f64,
    pub efficiency_se: f64,
    pub revenue: f64,
    pub revenue_se: f64,
    pub revenue_core: Option<f64>,
    pub rounds: f64,
    pub learning_error: Option<f64>,
    pub wd_nodes: Option<f64>,
    pub wd_solve_time: Option<f64>,
    pub optimality_gap: Option<f64>,
}

fn optional_mean(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = xs.collect();
    v.filter(|v| !v.is_empty()).map(|v| mean(&v))
}

impl ResultRow {
    pub fn aggregate(records: &[&SeedRecord]) -> ResultRow {
        let first = records[0];
        let eff: Vec<f64> = records.iter().map(|r| r.efficiency).collect();
        let rev: Vec<f64> = records.iter().map(|r| r.revenue).collect();
        ResultRow {
            mechanism: first.mechanism.clone(),
            ml: first.ml.clone(),
            heuristic: first.heuristic.clone(),
            payment: first.payment.clone(),
            seeds: records.len(),
            efficiency: mean(&eff),
            efficiency_se: std_err(&eff),
            revenue: mean(&rev),
            revenue_se: std_err(&rev),
            revenue_core: optional_mean(records.iter().map(|r| r.revenue_core)),
            rounds: mean(&records.iter().map(|r| r.rounds as f64).collect::<Vec<_>>()),
            learning_error: optional_mean(records.iter().map(|r| r.learning_error)),
            wd_nodes: optional_mean(records.iter().map(|r| r.wd_nodes.map(|x| x as f64))),
            wd_solve_time: optional_mean(records.iter().map(|r| r.wd_solve_time)),
            optimality_gap: optional_mean(records.iter().map(|r| r.optimality_gap)),
        }
    }
}

/// The configured mechanisms followed by the full-information VCG and
/// random-allocation benchmarks (unless already listed).
pub fn mechanism_order(cfg: &ExperimentConfig) -> Vec<Mechanism> {
    let mut order = cfg.mechanisms.clone();
    for extra in [Mechanism::Vcg, Mechanism::Random] {
        if !order.contains(&extra) {
            order.push(extra);
        }
    }
    order
}

/// Runs every seed (in parallel) and aggregates per mechanism.
pub fn run_batch(cfg: &ExperimentConfig, hooks: &Hooks) -> anyhow::Result<(Vec<ResultRow>, Vec<SeedRecord>)> {
    cfg.validate()?;
    let order = mechanism_order(cfg);
    let per_seed: Vec<Vec<SeedRecord>> = cfg
        .seeds
        .seeds()
        .par_iter()
        .map(|&seed| run_seed(cfg, &order, seed, hooks).with_context(|| format!("seed {seed} failed")))
        .collect::<anyhow::Result<_>>()?;
    let records: Vec<SeedRecord> = per_seed.into_iter().flatten().collect();
    let rows = (0..order.len())
        .map(|k| {
            let group: Vec<&SeedRecord> = records.iter().skip(k).step_by(order.len()).collect();
            ResultRow::aggregate(&group)
        })
        .collect();
    Ok((rows, records))
}

struct LpDump<'a> {
    dir: &'a std::path::Path,
    seed: u64,
    error: Option<anyhow::Error>,
}

impl MlcaObserver for LpDump<'_> {
    fn on_problem(&mut self, round: usize, provenance: Provenance, problem: &WdpProblem<'_>) {
        if provenance != Provenance::Main || self.error.is_some() {
            return;
        }
        let path = self.dir.join(format!("seed{}_round{round}_main.lp", self.seed));
        let res = to_lp_format(problem)
            .map_err(anyhow::Error::from)
            .and_then(|lp| std::fs::write(&path, lp).with_context(|| format!("writing {}", path.display())));
        if let Err(e) = res {
            self.error = Some(e);
        }
    }
}

/// All mechanisms in `order` on the instance generated from `seed`.
pub fn run_seed(cfg: &ExperimentConfig, order: &[Mechanism], seed: u64, hooks: &Hooks) -> anyhow::Result<Vec<SeedRecord>> {
    let domain = cfg.domain.generate(seed)?;
    let n = domain.n;
    let optimum = oracle_optimum(&domain, &EconomyIndex::main(n), None)?;
    let v_star = optimum.objective;
    ensure!(v_star > 0.0, "instance has zero optimal welfare");
    let mut out = Vec::with_capacity(order.len());
    for mech in order {
        let rec = match mech {
            Mechanism::Mlca => {
                let mcfg = cfg.mlca.config(n, seed, cfg.payment_rule);
                let strategies = vec![BidderStrategy::Truthful; n];
                let outcome = match &hooks.lp_dir {
                    Some(dir) => {
                        let mut dump = LpDump { dir, seed, error: None };
                        let o = run_mlca_observed(&domain, &strategies, &mcfg, &[], &mut dump)?;
                        if let Some(e) = dump.error {
                            return Err(e);
                        }
                        o
                    }
                    None => run_mlca_observed(&domain, &strategies, &mcfg, &[], &mut NoDump)?,
                };
                if let Some(dir) = &hooks.trace_dir {
                    let replay = ReplayFile { domain: domain.clone(), config: mcfg.clone(), strategies, push_bids: vec![], outcome: outcome.clone() };
                    write_json(&dir.join(format!("mlca_seed{seed}.json")), &replay)?;
                }
                let Trace::Mlca(trace) = &outcome.trace else { unreachable!() };
                let sample = default_error_sample(domain.m, seed);
                let mut errors = Vec::with_capacity(n);
                for i in 0..n {
                    let model = train(mcfg.learner_for(i), &outcome.reports[i], domain.m, &domain.bidders[i])?;
                    errors.push(learning_error(&model, &domain.bidders[i], &sample)?);
                }
                let mut r = mechanism_record(&domain, &outcome, v_star, seed, "mlca", cfg.payment_rule)?;
                r.ml = mcfg.learner.name().to_string();
                r.learning_error = Some(mean(&errors));
                r.wd_nodes = Some(trace.wd_nodes());
                r.wd_solve_time = Some(trace.solve_seconds());
                r.optimality_gap = Some(optimality_gap(trace));
                r
            }
            Mechanism::Cca => {
                let outcome = run_cca(&domain, cfg.heuristic, cfg.payment_rule)?;
                if let (Some(dir), Trace::Cca(t)) = (&hooks.trace_dir, &outcome.trace) {
                    write_clock_csv(&dir.join(format!("cca_seed{seed}.csv")), &t.clock)?;
                    write_json(&dir.join(format!("cca_seed{seed}.json")), &outcome)?;
                }
                let mut r = mechanism_record(&domain, &outcome, v_star, seed, "cca", cfg.payment_rule)?;
                r.heuristic = cfg.heuristic.name().to_string();
                r
            }
            Mechanism::Vcg => vcg_record(&domain, &optimum.allocation, v_star, seed)?,
            Mechanism::Random => {
                let a = random_allocation(&domain, seed);
                blank_record(seed, "random", "", social_welfare(&domain, &a) / v_star, 0.0, None, 0)
            }
        };
        ensure!((0.0..=1.0 + 1e-9).contains(&rec.efficiency), "efficiency {} out of range", rec.efficiency);
        out.push(rec);
    }
    Ok(out)
}

struct NoDump;
impl MlcaObserver for NoDump {}

fn blank_record(
    seed: u64,
    mechanism: &str,
    payment: &str,
    efficiency: f64,
    revenue: f64,
    revenue_core: Option<f64>,
    rounds: usize,
) -> SeedRecord {
    SeedRecord {
        seed,
        mechanism: mechanism.to_string(),
        ml: String::new(),
        heuristic: String::new(),
        payment: payment.to_string(),
        efficiency,
        revenue,
        revenue_core,
        rounds,
        learning_error: None,
        wd_nodes: None,
        wd_solve_time: None,
        optimality_gap: None,
    }
}

fn mechanism_record(
    domain: &DomainInstance,
    outcome: &AuctionOutcome,
    v_star: f64,
    seed: u64,
    mechanism: &str,
    rule: PaymentRule,
) -> anyhow::Result<SeedRecord> {
    outcome.check_ir_no_deficit().with_context(|| format!("{mechanism} violated IR or no-deficit"))?;
    let efficiency = efficiency_with_optimum(&outcome.allocation, domain, v_star)?;
    let revenue_core = match rule {
        PaymentRule::VcgNearest => Some(outcome.revenue() / v_star),
        PaymentRule::Vcg if domain.n <= mlca_core::mlca::MAX_CORE_BIDDERS => {
            Some(vcg_nearest_payments(&outcome.reports, domain.m)?.revenue() / v_star)
        }
        PaymentRule::Vcg => None,
    };
    Ok(blank_record(seed, mechanism, rule.name(), efficiency, outcome.revenue() / v_star, revenue_core, outcome.rounds))
}

/// Full-information benchmark: efficient allocation, VCG payments on true values.
fn vcg_record(domain: &DomainInstance, a_star: &Allocation, v_star: f64, seed: u64) -> anyhow::Result<SeedRecord> {
    let n = domain.n;
    let bids: Vec<f64> = (0..n).map(|i| domain.value(i, &a_star.bundle(i))).collect();
    let coalition = |mask: u64| -> anyhow::Result<f64> {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if members.is_empty() {
            return Ok(0.0);
        }
        Ok(oracle_optimum(domain, &EconomyIndex::from_members(n, members)?, None)?.objective)
    };
    let mut payments = Vec::with_capacity(n);
    for i in 0..n {
        let p = if n == 1 { 0.0 } else { coalition(((1u64 << n) - 1) & !(1 << i))? - (v_star - bids[i]) };
        payments.push(p.max(0.0));
    }
    let revenue_core = if n <= mlca_core::mlca::MAX_CORE_BIDDERS {
        let mut failure = None;
        let core = nearest_core_point(&payments, &bids, |c| {
            coalition(c).unwrap_or_else(|e| {
                failure = Some(e);
                0.0
            })
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        Some(core.iter().sum::<f64>() / v_star)
    } else {
        None
    };
    let efficiency = social_welfare(domain, a_star) / v_star;
    Ok(blank_record(seed, "vcg", "vcg", efficiency, payments.iter().sum::<f64>() / v_star, revenue_core, 0))
}

/// Each item goes to a uniformly chosen bidder or stays unassigned.
pub fn random_allocation(domain: &DomainInstance, seed: u64) -> Allocation {
    let (n, m) = (domain.n, domain.m);
    let mut rng = Stream::new(seed, "experiments/random", 0);
    let mut bits = vec![0u64; n];
    for j in 0..m {
        let k = rng.below(n as u64 + 1) as usize;
        if k < n {
            bits[k] |= 1 << j;
        }
    }
    Allocation::new(bits.into_iter().map(|b| Bundle::from_bits(m, b)).collect())
}

/// Mean relative gap of the learned WDP solves recorded in a trace.
pub fn optimality_gap(trace: &MlcaTrace) -> f64 {
    let gaps: Vec<f64> = trace
        .rounds
        .iter()
        .flat_map(|r| r.economies.iter())
        .map(|e| {
            let diff = (e.bound - e.learned_welfare).max(0.0);
            if e.learned_welfare > 0.0 {
                diff / e.learned_welfare
            } else {
                diff
            }
        })
        .collect();
    if gaps.is_empty() {
        0.0
    } else {
        mean(&gaps)
    }
}
