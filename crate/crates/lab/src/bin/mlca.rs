use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlca_core::cca::SupplementaryHeuristic;
use mlca_core::diagnostics::bound_report;
use mlca_core::learning::{KernelSpec, LearnerSpec};
use mlca_core::mlca::replay;
use mlca_core::wdp::SolveLimits;
use mlca_core::{PaymentRule, Trace};
use mlca_lab::formats::{
    read_json, write_bound_csv, write_grid_csv, write_manipulation_csv, write_manipulation_runs_csv, write_results_csv,
    write_seed_csv, ReplayFile,
};
use mlca_lab::{
    kernel_grid, manipulation_study, run_batch, DomainKind, DomainSpec, ExperimentConfig, GridConfig, Hooks, Mechanism,
    MlcaSettings, SeedRange,
};

#[derive(Parser)]
#[command(name = "mlca", version, about = "Seeded MLCA, clock auction and benchmark experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run mechanisms over a seed range and write aggregate results.
    Run(RunArgs),
    /// Learned-WDP quality per kernel, ε and sample size.
    Grid(GridArgs),
    /// Overbidding study with one-way ANOVA across strategies.
    Manipulate(ManipulateArgs),
    /// Efficiency-loss bounds and clearing certificates from a replay file.
    Certify(CertifyArgs),
    /// Rerun a replay file and check it reproduces the recorded outcome.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    Linear,
    Quadratic,
    Exponential,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum MlKind {
    /// Support vector regression with the chosen kernel.
    Svr,
    /// Regularised linear regression.
    Lr,
    /// The true valuations.
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum PaymentArg {
    Vcg,
    VcgNearest,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Clock,
    ClockRaised,
    ProfitMax,
}

fn kernel_spec(kind: KernelKind, lambda: Option<f64>, m: usize) -> KernelSpec {
    match kind {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Quadratic => KernelSpec::Quadratic { lambda: lambda.unwrap_or(0.1) },
        KernelKind::Exponential => KernelSpec::Exponential { lambda: lambda.unwrap_or(m as f64) },
        KernelKind::Gaussian => KernelSpec::Gaussian { lambda: lambda.unwrap_or(m as f64) },
    }
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long, value_enum, default_value = "gsvm")]
    domain: DomainKind,
    #[arg(long, default_value_t = 12)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Inclusive seed range `A..B`.
    #[arg(long, default_value = "1..30")]
    seeds: SeedRange,
}

impl DomainArgs {
    fn spec(&self) -> DomainSpec {
        DomainSpec { kind: self.domain, m: self.m, n: self.n }
    }
}

#[derive(Args)]
struct MlcaArgs {
    #[arg(long, default_value_t = 40)]
    qmax: usize,
    #[arg(long, default_value_t = 12)]
    qinit: usize,
    /// Queries per bidder per round; defaults to the number of bidders.
    #[arg(long)]
    qround: Option<usize>,
    #[arg(long, value_enum, default_value = "svr")]
    ml: MlKind,
    #[arg(long, value_enum, default_value = "quadratic")]
    kernel: KernelKind,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 1e4)]
    c: f64,
    /// Kernel parameter; 0.1 for quadratic and m for the exponential kernels when omitted.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "vcg")]
    payment: PaymentArg,
    /// Seconds per winner-determination solve (0 for none).
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<u64>,
}

impl MlcaArgs {
    fn settings(&self, m: usize) -> MlcaSettings {
        let learner = match self.ml {
            MlKind::Svr => LearnerSpec::Svr { kernel: kernel_spec(self.kernel, self.lambda, m), epsilon: self.eps, c: self.c },
            MlKind::Lr => LearnerSpec::Linear { c: self.c },
            MlKind::Oracle => LearnerSpec::Oracle,
        };
        MlcaSettings { q_max: self.qmax, q_init: self.qinit, q_round: self.qround, learner, limits: self.limits() }
    }

    fn limits(&self) -> SolveLimits {
        SolveLimits { time_limit: (self.time_limit > 0.0).then_some(self.time_limit), node_limit: self.node_limit }
    }

    fn payment_rule(&self) -> PaymentRule {
        match self.payment {
            PaymentArg::Vcg => PaymentRule::Vcg,
            PaymentArg::VcgNearest => PaymentRule::VcgNearest,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    mlca: MlcaArgs,
    /// Mechanisms to run; the VCG and random benchmarks are always appended.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mlca,cca")]
    mechanism: Vec<Mechanism>,
    #[arg(long, value_enum, default_value = "clock")]
    heuristic: HeuristicArg,
    /// Bundles added by the profit-max heuristic; defaults to --qmax.
    #[arg(long)]
    profit_q: Option<usize>,
    /// Aggregate CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-seed CSV.
    #[arg(long)]
    per_seed_out: Option<PathBuf>,
    /// Add wall-clock solve time columns (not reproducible across runs).
    #[arg(long)]
    timing: bool,
    /// Directory for per-seed replay files and clock traces.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Directory for LP files of every main-economy learned WDP.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "linear,quadratic,exponential,gaussian")]
    kernels: Vec<KernelKind>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,4")]
    eps: Vec<f64>,
    /// Training sample sizes per bidder.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
    q: Vec<usize>,
    #[arg(long, default_value_t = 1e4)]
    c: f64,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per seed and cell CSV.
    #[arg(long)]
    cells_out: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ManipulateArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    mlca: MlcaArgs,
    /// Manipulating bidder: a role name (national, regional) or an index.
    #[arg(long, default_value = "regional")]
    role: String,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,0.99")]
    z: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-run CSV.
    #[arg(long)]
    runs_out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Replay file written by `run --trace-out`.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    file: PathBuf,
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn ensure_dir(dir: &Option<PathBuf>) -> anyhow::Result<()> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(())
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let m = args.domain.m;
    let heuristic = match args.heuristic {
        HeuristicArg::Clock => SupplementaryHeuristic::Clock,
        HeuristicArg::ClockRaised => SupplementaryHeuristic::ClockRaised,
        HeuristicArg::ProfitMax => SupplementaryHeuristic::ProfitMax { q: args.profit_q.unwrap_or(args.mlca.qmax) },
    };
    let cfg = ExperimentConfig {
        domain: args.domain.spec(),
        seeds: args.domain.seeds,
        mechanisms: args.mechanism.clone(),
        mlca: args.mlca.settings(m),
        heuristic,
        payment_rule: args.mlca.payment_rule(),
    };
    ensure_dir(&args.trace_out)?;
    ensure_dir(&args.dump_lp)?;
    let hooks = Hooks { trace_dir: args.trace_out.clone(), lp_dir: args.dump_lp.clone() };
    let (rows, records) = run_batch(&cfg, &hooks)?;
    write_results_csv(output(&args.out)?, &rows, args.timing)?;
    if let Some(p) = &args.per_seed_out {
        write_seed_csv(output(&Some(p.clone()))?, &records, args.timing)?;
    }
    Ok(())
}

fn grid(args: GridArgs) -> anyhow::Result<()> {
    let m = args.domain.m;
    let cfg = GridConfig {
        domain: args.domain.spec(),
        seeds: args.domain.seeds,
        kernels: args.kernels.iter().map(|&k| kernel_spec(k, args.lambda, m)).collect(),
        epsilons: args.eps.clone(),
        qs: args.q.clone(),
        c: args.c,
        limits: SolveLimits { time_limit: (args.time_limit > 0.0).then_some(args.time_limit), node_limit: None },
    };
    let (rows, cells) = kernel_grid(&cfg)?;
    write_grid_csv(output(&args.out)?, &rows, args.timing)?;
    if let Some(p) = &args.cells_out {
        let mut w = csv::Writer::from_writer(File::create(p)?);
        w.write_record(["seed", "kernel", "epsilon", "q", "efficiency", "learning_error", "support_vectors", "wd_nodes", "optimality_gap"])?;
        for c in &cells {
            let svs: Vec<String> = c.support_vectors.iter().map(|s| s.to_string()).collect();
            w.write_record([
                c.seed.to_string(),
                c.kernel.clone(),
                format!("{:.6}", c.epsilon),
                c.q.to_string(),
                format!("{:.6}", c.efficiency),
                format!("{:.6}", c.learning_error),
                svs.join(" "),
                c.wd_nodes.to_string(),
                format!("{:.6}", c.optimality_gap),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn manipulate(args: ManipulateArgs) -> anyhow::Result<()> {
    let m = args.domain.m;
    let cfg = ExperimentConfig {
        domain: args.domain.spec(),
        seeds: args.domain.seeds,
        mechanisms: vec![Mechanism::Mlca],
        mlca: args.mlca.settings(m),
        heuristic: SupplementaryHeuristic::Clock,
        payment_rule: args.mlca.payment_rule(),
    };
    let report = manipulation_study(&cfg, &args.role, &args.z)?;
    write_manipulation_csv(output(&args.out)?, &report)?;
    if let Some(p) = &args.runs_out {
        write_manipulation_runs_csv(File::create(p)?, &report.runs)?;
    }
    Ok(())
}

fn load_replay(path: &Path) -> anyhow::Result<ReplayFile> {
    read_json(path)
}

fn certify(args: CertifyArgs) -> anyhow::Result<()> {
    let file = load_replay(&args.trace)?;
    let Trace::Mlca(trace) = &file.outcome.trace else { bail!("{} is not an MLCA trace", args.trace.display()) };
    let records = bound_report(trace, &file.domain)?;
    write_bound_csv(output(&args.out)?, &records)
}

fn replay_cmd(args: ReplayArgs) -> anyhow::Result<()> {
    let file = load_replay(&args.file)?;
    replay(&file.domain, &file.strategies, &file.config, &file.push_bids, &file.outcome)?;
    println!("replay reproduced {} rounds", file.outcome.rounds);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::Grid(a) => grid(a),
        Command::Manipulate(a) => manipulate(a),
        Command::Certify(a) => certify(a),
        Command::Replay(a) => replay_cmd(a),
    }
}
