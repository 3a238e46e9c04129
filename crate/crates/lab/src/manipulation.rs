//! Overbidding study: one bidder inflates its reports, everyone else is truthful.

use anyhow::{ensure, Context};
use mlca_core::auction::efficiency_with_optimum;
use mlca_core::mlca::run_mlca;
use mlca_core::valuemodels::BidderStrategy;
use mlca_core::wdp::oracle_optimum;
use mlca_core::{social_welfare, utility, wdp_over_reports, EconomyIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::formats::f;
use crate::stats::{mean, one_way_anova, std_err};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManipulationRun {
    pub seed: u64,
    pub strategy: String,
    pub social_welfare: f64,
    pub efficiency: f64,
    /// Reported welfare of the marginal economy without the manipulator.
    pub marginal_welfare: f64,
    /// Manipulator's true utility.
    pub utility: f64,
    /// Whether the manipulator won a bundle it reported above its true value.
    pub won_misreport: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub seeds: usize,
    /// (mean, standard error)
    pub social_welfare: (f64, f64),
    pub marginal_welfare: (f64, f64),
    pub utility: (f64, f64),
    pub misreport_wins: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManipulationReport {
    pub manipulator: usize,
    pub runs: Vec<ManipulationRun>,
    pub summary: Vec<StrategySummary>,
    pub welfare_p: f64,
    pub marginal_p: f64,
    pub utility_p: f64,
}

fn label(z: Option<f64>) -> String {
    z.map_or("truthful".to_string(), |z| format!("overbid-{}", f(z)))
}

/// Runs MLCA on paired seeds with the bidder named by `role` truthful and then
/// overbidding with each factor in `z_values`.
pub fn manipulation_study(cfg: &ExperimentConfig, role: &str, z_values: &[f64]) -> anyhow::Result<ManipulationReport> {
    cfg.validate()?;
    for &z in z_values {
        ensure!((0.0..1.0).contains(&z), "overbid factor {z} outside [0, 1)");
    }
    let strategies: Vec<Option<f64>> = std::iter::once(None).chain(z_values.iter().map(|&z| Some(z))).collect();
    let seeds = cfg.seeds.seeds();
    let per_seed: Vec<(usize, Vec<ManipulationRun>)> = seeds
        .par_iter()
        .map(|&seed| study_seed(cfg, role, &strategies, seed).with_context(|| format!("seed {seed} failed")))
        .collect::<anyhow::Result<_>>()?;
    let manipulator = per_seed.first().map_or(0, |(i, _)| *i);
    let runs: Vec<ManipulationRun> = per_seed.into_iter().flat_map(|(_, r)| r).collect();
    let k = strategies.len();
    let groups = |g: &dyn Fn(&ManipulationRun) -> f64| -> Vec<Vec<f64>> {
        (0..k).map(|s| runs.iter().skip(s).step_by(k).map(g).collect()).collect()
    };
    let welfare = groups(&|r| r.social_welfare);
    let marginal = groups(&|r| r.marginal_welfare);
    let util = groups(&|r| r.utility);
    let summary = (0..k)
        .map(|s| StrategySummary {
            strategy: label(strategies[s]),
            seeds: seeds.len(),
            social_welfare: (mean(&welfare[s]), std_err(&welfare[s])),
            marginal_welfare: (mean(&marginal[s]), std_err(&marginal[s])),
            utility: (mean(&util[s]), std_err(&util[s])),
            misreport_wins: runs.iter().skip(s).step_by(k).filter(|r| r.won_misreport).count(),
        })
        .collect();
    Ok(ManipulationReport {
        manipulator,
        summary,
        welfare_p: one_way_anova(&welfare).p,
        marginal_p: one_way_anova(&marginal).p,
        utility_p: one_way_anova(&util).p,
        runs,
    })
}

fn study_seed(
    cfg: &ExperimentConfig,
    role: &str,
    strategies: &[Option<f64>],
    seed: u64,
) -> anyhow::Result<(usize, Vec<ManipulationRun>)> {
    let domain = cfg.domain.generate(seed)?;
    let n = domain.n;
    let i = domain.bidder_by_role(role)?;
    let v_star = oracle_optimum(&domain, &EconomyIndex::main(n), None)?.objective;
    let mcfg = cfg.mlca.config(n, seed, cfg.payment_rule);
    let mut runs = Vec::with_capacity(strategies.len());
    for z in strategies {
        let mut profile = vec![BidderStrategy::Truthful; n];
        if let Some(z) = z {
            profile[i] = BidderStrategy::Overbid { z: *z };
        }
        let out = run_mlca(&domain, &profile, &mcfg, &[])?;
        out.check_ir_no_deficit()?;
        let won = out.allocation.bundle(i);
        let reported = out.reports[i].get(&won).unwrap_or(0.0);
        runs.push(ManipulationRun {
            seed,
            strategy: label(*z),
            social_welfare: social_welfare(&domain, &out.allocation),
            efficiency: efficiency_with_optimum(&out.allocation, &domain, v_star)?,
            marginal_welfare: wdp_over_reports(&out.reports, &EconomyIndex::marginal(n, i), domain.m).welfare,
            utility: utility(i, &out.allocation, &out.payments, &domain.bidders[i]),
            won_misreport: !won.is_empty() && (reported - domain.value(i, &won)).abs() > 1e-9,
        });
    }
    Ok((i, runs))
}
