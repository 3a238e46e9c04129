//! JSON replay files and CSV tables. Floats are written with six decimals and
//! missing values as empty fields.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use mlca_core::cca::ClockState;
use mlca_core::diagnostics::BoundRecord;
use mlca_core::mlca::{MlcaConfig, Provenance};
use mlca_core::valuemodels::{BidderStrategy, DomainInstance};
use mlca_core::{AuctionOutcome, BundleValueReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::batch::{ResultRow, SeedRecord};
use crate::grid::GridRow;
use crate::manipulation::{ManipulationReport, ManipulationRun};

/// Everything needed to rerun an MLCA auction, plus its recorded outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayFile {
    pub domain: DomainInstance,
    pub config: MlcaConfig,
    pub strategies: Vec<BidderStrategy>,
    pub push_bids: Vec<Vec<BundleValueReport>>,
    pub outcome: AuctionOutcome,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn f(x: f64) -> String {
    let s = format!("{x:.6}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn finish<W: Write>(w: csv::Writer<W>) -> anyhow::Result<()> {
    w.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {}", e.error()))?.flush()?;
    Ok(())
}

/// Aggregated batch results. `timing` adds the (nondeterministic) solve time column.
pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow], timing: bool) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "mechanism", "ml", "heuristic", "payment", "seeds", "efficiency", "efficiency_se", "revenue", "revenue_se",
        "revenue_core", "rounds", "learning_error", "wd_nodes", "optimality_gap",
    ];
    if timing {
        header.push("wd_solve_time");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.mechanism.clone(),
            r.ml.clone(),
            r.heuristic.clone(),
            r.payment.clone(),
            r.seeds.to_string(),
            f(r.efficiency),
            f(r.efficiency_se),
            f(r.revenue),
            f(r.revenue_se),
            opt(r.revenue_core),
            f(r.rounds),
            opt(r.learning_error),
            opt(r.wd_nodes),
            opt(r.optimality_gap),
        ];
        if timing {
            rec.push(opt(r.wd_solve_time));
        }
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn write_seed_csv<W: Write>(out: W, records: &[SeedRecord], timing: bool) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "seed", "mechanism", "ml", "heuristic", "payment", "efficiency", "revenue", "revenue_core", "rounds",
        "learning_error", "wd_nodes", "optimality_gap",
    ];
    if timing {
        header.push("wd_solve_time");
    }
    w.write_record(&header)?;
    for r in records {
        let mut rec = vec![
            r.seed.to_string(),
            r.mechanism.clone(),
            r.ml.clone(),
            r.heuristic.clone(),
            r.payment.clone(),
            f(r.efficiency),
            f(r.revenue),
            opt(r.revenue_core),
            r.rounds.to_string(),
            opt(r.learning_error),
            r.wd_nodes.map(|x| x.to_string()).unwrap_or_default(),
            opt(r.optimality_gap),
        ];
        if timing {
            rec.push(opt(r.wd_solve_time));
        }
        w.write_record(&rec)?;
    }
    finish(w)
}

/// Prices and demanded bundles per clock round.
pub fn write_clock_csv(path: &Path, state: &ClockState) -> anyhow::Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_clock(file, state)
}

pub fn write_clock<W: Write>(out: W, state: &ClockState) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let m = state.prices.len();
    let n = state.demand_history.first().map_or(0, Vec::len);
    let mut header = vec!["round".to_string()];
    header.extend((0..m).map(|j| format!("price_{j}")));
    header.extend((0..n).map(|i| format!("demand_{i}")));
    w.write_record(&header)?;
    for (t, (prices, demands)) in state.price_history.iter().zip(&state.demand_history).enumerate() {
        let mut rec = vec![(t + 1).to_string()];
        rec.extend(prices.iter().map(|&p| f(p)));
        rec.extend(demands.iter().map(|d| d.to_bit_string()));
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn provenance_label(p: &Provenance) -> String {
    match p {
        Provenance::Push => "push".into(),
        Provenance::Initial => "initial".into(),
        Provenance::Main => "main".into(),
        Provenance::Marginal(i) => format!("marginal-{i}"),
    }
}

pub fn write_bound_csv<W: Write>(out: W, records: &[BoundRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "economy", "delta1", "delta2", "eff_loss", "bound", "slack", "clearing_delta"])?;
    for r in records {
        w.write_record([
            r.round.to_string(),
            provenance_label(&r.economy),
            f(r.delta1),
            f(r.delta2),
            f(r.eff_loss),
            f(r.bound),
            f(r.slack),
            opt(r.clearing_delta),
        ])?;
    }
    finish(w)
}

pub fn write_grid_csv<W: Write>(out: W, rows: &[GridRow], timing: bool) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "kernel", "epsilon", "q", "seeds", "efficiency", "efficiency_se", "learning_error", "support_vectors",
        "wd_nodes", "optimality_gap",
    ];
    if timing {
        header.push("wd_solve_time");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.kernel.clone(),
            f(r.epsilon),
            r.q.to_string(),
            r.seeds.to_string(),
            f(r.efficiency),
            f(r.efficiency_se),
            f(r.learning_error),
            f(r.support_vectors),
            f(r.wd_nodes),
            f(r.optimality_gap),
        ];
        if timing {
            rec.push(f(r.wd_solve_time));
        }
        w.write_record(&rec)?;
    }
    finish(w)
}

/// Per-strategy means and standard errors, with the ANOVA p-value of each column.
pub fn write_manipulation_csv<W: Write>(out: W, report: &ManipulationReport) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "strategy", "seeds", "social_welfare", "social_welfare_se", "marginal_welfare", "marginal_welfare_se",
        "utility", "utility_se", "misreport_wins",
    ])?;
    for s in &report.summary {
        w.write_record([
            s.strategy.clone(),
            s.seeds.to_string(),
            f(s.social_welfare.0),
            f(s.social_welfare.1),
            f(s.marginal_welfare.0),
            f(s.marginal_welfare.1),
            f(s.utility.0),
            f(s.utility.1),
            s.misreport_wins.to_string(),
        ])?;
    }
    w.write_record([
        "anova_p".to_string(),
        String::new(),
        f(report.welfare_p),
        String::new(),
        f(report.marginal_p),
        String::new(),
        f(report.utility_p),
        String::new(),
        String::new(),
    ])?;
    finish(w)
}

pub fn write_manipulation_runs_csv<W: Write>(out: W, runs: &[ManipulationRun]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "strategy", "social_welfare", "efficiency", "marginal_welfare", "utility", "won_misreport"])?;
    for r in runs {
        w.write_record([
            r.seed.to_string(),
            r.strategy.clone(),
            f(r.social_welfare),
            f(r.efficiency),
            f(r.marginal_welfare),
            f(r.utility),
            r.won_misreport.to_string(),
        ])?;
    }
    finish(w)
}
