//! Learned-WDP quality on random truthful samples, per kernel, ε and sample size.

use anyhow::{ensure, Context};
use mlca_core::auction::efficiency_with_optimum;
use mlca_core::learning::{default_error_sample, learning_error, train_svr, KernelSpec, LearnedValuation};
use mlca_core::rng::Stream;
use mlca_core::wdp::{oracle_optimum, solve, SolveLimits, Stopwatch, WdpModels, WdpProblem};
use mlca_core::{Bundle, EconomyIndex, ReportSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DomainSpec, SeedRange};
use crate::stats::{mean, std_err};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub domain: DomainSpec,
    pub seeds: SeedRange,
    pub kernels: Vec<KernelSpec>,
    pub epsilons: Vec<f64>,
    pub qs: Vec<usize>,
    pub c: f64,
    pub limits: SolveLimits,
}

/// One (kernel, ε, Q) cell on one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub seed: u64,
    pub kernel: String,
    pub epsilon: f64,
    pub q: usize,
    pub efficiency: f64,
    pub learning_error: f64,
    /// Per bidder.
    pub support_vectors: Vec<usize>,
    pub wd_nodes: u64,
    pub wd_solve_time: f64,
    pub optimality_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub kernel: String,
    pub epsilon: f64,
    pub q: usize,
    pub seeds: usize,
    pub efficiency: f64,
    pub efficiency_se: f64,
    pub learning_error: f64,
    pub support_vectors: f64,
    pub wd_nodes: f64,
    pub wd_solve_time: f64,
    pub optimality_gap: f64,
}

/// `q` distinct uniform nonempty bundles.
fn sample_bundles(m: usize, q: usize, rng: &mut Stream) -> Vec<Bundle> {
    let mut seen = std::collections::BTreeSet::new();
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    while seen.len() < q {
        let b = rng.next_u64() & mask;
        if b != 0 {
            seen.insert(b);
        }
    }
    let mut order: Vec<u64> = seen.into_iter().collect();
    rng.shuffle(&mut order);
    order.into_iter().map(|b| Bundle::from_bits(m, b)).collect()
}

pub fn kernel_grid(cfg: &GridConfig) -> anyhow::Result<(Vec<GridRow>, Vec<GridCell>)> {
    let m = cfg.domain.m;
    for &q in &cfg.qs {
        ensure!(m >= 63 || q < (1usize << m), "sample size {q} exceeds the {} nonempty bundles", (1u64 << m) - 1);
    }
    for k in &cfg.kernels {
        k.validate()?;
    }
    let per_seed: Vec<Vec<GridCell>> = cfg
        .seeds
        .seeds()
        .par_iter()
        .map(|&seed| grid_seed(cfg, seed).with_context(|| format!("seed {seed} failed")))
        .collect::<anyhow::Result<_>>()?;
    let cells: Vec<GridCell> = per_seed.into_iter().flatten().collect();
    let per = cfg.kernels.len() * cfg.epsilons.len() * cfg.qs.len();
    let rows = (0..per)
        .map(|k| {
            let group: Vec<&GridCell> = cells.iter().skip(k).step_by(per).collect();
            let eff: Vec<f64> = group.iter().map(|c| c.efficiency).collect();
            let avg = |g: &dyn Fn(&GridCell) -> f64| mean(&group.iter().map(|c| g(c)).collect::<Vec<_>>());
            GridRow {
                kernel: group[0].kernel.clone(),
                epsilon: group[0].epsilon,
                q: group[0].q,
                seeds: group.len(),
                efficiency: mean(&eff),
                efficiency_se: std_err(&eff),
                learning_error: avg(&|c| c.learning_error),
                support_vectors: avg(&|c| c.support_vectors.iter().sum::<usize>() as f64 / c.support_vectors.len() as f64),
                wd_nodes: avg(&|c| c.wd_nodes as f64),
                wd_solve_time: avg(&|c| c.wd_solve_time),
                optimality_gap: avg(&|c| c.optimality_gap),
            }
        })
        .collect();
    Ok((rows, cells))
}

fn grid_seed(cfg: &GridConfig, seed: u64) -> anyhow::Result<Vec<GridCell>> {
    let domain = cfg.domain.generate(seed)?;
    let (n, m) = (domain.n, domain.m);
    let v_star = oracle_optimum(&domain, &EconomyIndex::main(n), None)?.objective;
    let error_sample = default_error_sample(m, seed);
    let q_max = cfg.qs.iter().copied().max().unwrap_or(0);
    // nested samples: the first q bundles of one draw per bidder
    let samples: Vec<Vec<Bundle>> =
        (0..n).map(|i| sample_bundles(m, q_max, &mut Stream::new(seed, "grid/sample", i as u64))).collect();
    let mut cells = Vec::new();
    for kernel in &cfg.kernels {
        for &epsilon in &cfg.epsilons {
            for &q in &cfg.qs {
                let mut models = Vec::with_capacity(n);
                let mut svs = Vec::with_capacity(n);
                let mut errors = Vec::with_capacity(n);
                for i in 0..n {
                    let mut reports = ReportSet::new();
                    for b in &samples[i][..q] {
                        reports.insert(*b, domain.value(i, b))?;
                    }
                    let model = train_svr(&reports, m, *kernel, epsilon, cfg.c)?;
                    svs.push(model.support_vectors.len());
                    let model = LearnedValuation::Svr(model);
                    errors.push(learning_error(&model, &domain.bidders[i], &error_sample)?);
                    models.push(model);
                }
                let models = WdpModels::new(models, m);
                let watch = Stopwatch::start();
                let sol = solve(&WdpProblem::new(&models, EconomyIndex::main(n)).with_limits(cfg.limits))?;
                let time = watch.seconds();
                let (gap, _) = sol.gap();
                cells.push(GridCell {
                    seed,
                    kernel: kernel.name().to_string(),
                    epsilon,
                    q,
                    efficiency: efficiency_with_optimum(&sol.allocation, &domain, v_star)?,
                    learning_error: mean(&errors),
                    support_vectors: svs,
                    wd_nodes: sol.nodes,
                    wd_solve_time: time,
                    optimality_gap: gap,
                });
            }
        }
    }
    Ok(cells)
}
