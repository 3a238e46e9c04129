use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};
use mlca_core::cca::SupplementaryHeuristic;
use mlca_core::learning::LearnerSpec;
use mlca_core::mlca::MlcaConfig;
use mlca_core::valuemodels::{generate_gsvm, generate_twowise, DomainInstance};
use mlca_core::wdp::SolveLimits;
use mlca_core::PaymentRule;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Gsvm,
    Twowise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub m: usize,
    pub n: usize,
}

impl DomainSpec {
    pub fn generate(&self, seed: u64) -> anyhow::Result<DomainInstance> {
        Ok(match self.kind {
            DomainKind::Gsvm => generate_gsvm(seed, self.m, self.n)?,
            DomainKind::Twowise => generate_twowise(seed, self.m, self.n)?,
        })
    }
}

/// Inclusive seed range, written `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn new(start: u64, end: u64) -> anyhow::Result<Self> {
        if end < start {
            bail!("empty seed range {start}..{end}");
        }
        Ok(SeedRange { start, end })
    }

    pub fn seeds(&self) -> Vec<u64> {
        (self.start..=self.end).collect()
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for SeedRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                SeedRange::new(a.trim().parse().context("seed range start")?, b.trim().parse().context("seed range end")?)
            }
            None => {
                let x = s.trim().parse().context("seed")?;
                SeedRange::new(x, x)
            }
        }
    }
}

impl fmt::Display for SeedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Mlca,
    Cca,
    Vcg,
    Random,
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Mlca => "mlca",
            Mechanism::Cca => "cca",
            Mechanism::Vcg => "vcg",
            Mechanism::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlcaSettings {
    pub q_max: usize,
    pub q_init: usize,
    /// Defaults to the number of bidders.
    pub q_round: Option<usize>,
    pub learner: LearnerSpec,
    pub limits: SolveLimits,
}

impl MlcaSettings {
    pub fn config(&self, n: usize, seed: u64, payment_rule: PaymentRule) -> MlcaConfig {
        let mut cfg = MlcaConfig::new(self.learner, self.q_max, self.q_init, self.q_round.unwrap_or(n), seed);
        cfg.payment_rule = payment_rule;
        cfg.limits = self.limits;
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    pub seeds: SeedRange,
    pub mechanisms: Vec<Mechanism>,
    pub mlca: MlcaSettings,
    pub heuristic: SupplementaryHeuristic,
    pub payment_rule: PaymentRule,
}

impl ExperimentConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.mechanisms.is_empty() {
            bail!("no mechanism selected");
        }
        self.mlca.config(self.domain.n, 0, self.payment_rule).validate(self.domain.n)?;
        Ok(())
    }
}
