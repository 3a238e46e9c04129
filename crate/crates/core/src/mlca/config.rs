use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::learning::LearnerSpec;
use crate::wdp::SolveLimits;
use crate::{Bundle, Error, PaymentRule, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlcaConfig {
    /// Maximum number of value queries per bidder.
    pub q_max: usize,
    /// Random initial queries per bidder.
    pub q_init: usize,
    /// Queries per bidder per round.
    pub q_round: usize,
    /// Maximum number of push bids per bidder.
    pub p_max: usize,
    pub learner: LearnerSpec,
    /// Per-bidder learners; when empty every bidder uses `learner`.
    #[serde(default)]
    pub bidder_learners: Vec<LearnerSpec>,
    pub seed: u64,
    pub payment_rule: PaymentRule,
    pub limits: SolveLimits,
    /// Replaces the random initial queries (one list per bidder).
    #[serde(default)]
    pub initial_queries: Option<Vec<Vec<Bundle>>>,
}

impl MlcaConfig {
    /// VCG payments, no push bids, default solver limits.
    pub fn new(learner: LearnerSpec, q_max: usize, q_init: usize, q_round: usize, seed: u64) -> Self {
        MlcaConfig {
            q_max,
            q_init,
            q_round,
            p_max: 0,
            learner,
            bidder_learners: Vec::new(),
            seed,
            payment_rule: PaymentRule::Vcg,
            limits: SolveLimits::default(),
            initial_queries: None,
        }
    }

    pub fn learner_for(&self, i: usize) -> &LearnerSpec {
        self.bidder_learners.get(i).unwrap_or(&self.learner)
    }

    /// Number of rounds `T = ⌊(Q_max - Q_init) / Q_round⌋`.
    pub fn rounds(&self) -> usize {
        (self.q_max - self.q_init) / self.q_round
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.q_init > self.q_max {
            return Err(Error::InvalidParameter("q_init exceeds q_max".into()));
        }
        if self.q_round == 0 {
            return Err(Error::InvalidParameter("q_round must be at least 1".into()));
        }
        if !self.bidder_learners.is_empty() && self.bidder_learners.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.bidder_learners.len() });
        }
        self.learner.validate()?;
        for l in &self.bidder_learners {
            l.validate()?;
        }
        if let Some(q) = &self.initial_queries {
            if q.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: q.len() });
            }
            if q.iter().any(|qi| qi.len() > self.q_max) {
                return Err(Error::InvalidParameter("more initial queries than q_max".into()));
            }
        }
        Ok(())
    }
}
