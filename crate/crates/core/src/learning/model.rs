use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{train_linear, train_svr, KernelSpec, LinearModel, SvrModel};
use crate::rng::Stream;
use crate::valuemodels::BidderValuation;
use crate::{Bundle, Error, ReportSet, Result};

/// A learned (or, for testing, exact) value function `ṽ_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LearnedValuation {
    Linear(LinearModel),
    Svr(SvrModel),
    /// The bidder's true valuation, standing in for a perfect learner.
    Oracle(BidderValuation),
}

impl LearnedValuation {
    pub fn predict(&self, x: &Bundle) -> f64 {
        match self {
            LearnedValuation::Linear(l) => l.predict(x),
            LearnedValuation::Svr(s) => s.predict(x),
            LearnedValuation::Oracle(v) => v.value(x),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LearnedValuation::Linear(_) => "linear-regression",
            LearnedValuation::Svr(s) => s.kernel.name(),
            LearnedValuation::Oracle(_) => "oracle",
        }
    }
}

/// How to train a bidder's learned valuation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LearnerSpec {
    /// Regularized linear regression.
    Linear { c: f64 },
    Svr { kernel: KernelSpec, epsilon: f64, c: f64 },
    /// Perfect learner: uses the true valuation.
    Oracle,
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Linear { .. } => "linear-regression",
            LearnerSpec::Svr { kernel, .. } => kernel.name(),
            LearnerSpec::Oracle => "oracle",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LearnerSpec::Linear { c } if c.is_finite() && *c > 0.0 => Ok(()),
            LearnerSpec::Svr { kernel, epsilon, c } if c.is_finite() && *c > 0.0 && *epsilon >= 0.0 => {
                kernel.validate()
            }
            LearnerSpec::Oracle => Ok(()),
            _ => Err(Error::InvalidParameter(alloc::format!("invalid learner {self:?}"))),
        }
    }
}

/// Trains a learner on a bidder's reports. `truth` is only read by the oracle learner.
pub fn train(spec: &LearnerSpec, reports: &ReportSet, m: usize, truth: &BidderValuation) -> Result<LearnedValuation> {
    Ok(match *spec {
        LearnerSpec::Linear { c } => LearnedValuation::Linear(train_linear(reports, m, c)?),
        LearnerSpec::Svr { kernel, epsilon, c } => LearnedValuation::Svr(train_svr(reports, m, kernel, epsilon, c)?),
        LearnerSpec::Oracle => LearnedValuation::Oracle(truth.clone()),
    })
}

/// All `2^m` bundles when `m ≤ 18`, otherwise 100,000 uniform draws from the seeded stream.
pub fn default_error_sample(m: usize, seed: u64) -> Vec<Bundle> {
    if m <= 18 {
        Bundle::all(m).collect()
    } else {
        let mut rng = Stream::new(seed, "learning-error-sample", 0);
        (0..100_000).map(|_| Bundle::from_bits(m, rng.next_u64())).collect()
    }
}

/// Mean absolute prediction error over the sample.
pub fn learning_error(model: &LearnedValuation, v: &BidderValuation, sample: &[Bundle]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("empty learning-error sample".into()));
    }
    let total: f64 = sample.iter().map(|x| (model.predict(x) - v.value(x)).abs()).sum();
    Ok(total / sample.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuemodels::{GsvmBidder, GsvmRole};

    #[test]
    fn oracle_and_shifted_models() {
        let v = BidderValuation::Gsvm(GsvmBidder { role: GsvmRole::Regional, item_values: alloc::vec![4.0, 1.0] });
        let sample: Vec<Bundle> = Bundle::all(2).collect();
        let oracle = LearnedValuation::Oracle(v.clone());
        assert_eq!(learning_error(&oracle, &v, &sample).unwrap(), 0.0);
        let sv = Bundle::parse("00").unwrap();
        // exp(0/λ) = 1 everywhere for the empty support vector, so coefficient 2 shifts every prediction by 2
        let mut shifted = super::super::train_svr(&ReportSet::new(), 2, KernelSpec::Exponential { lambda: 1.0 }, 0.0, 1.0).unwrap();
        shifted.support_vectors.push(sv);
        shifted.coeffs.push(2.0);
        let table = BidderValuation::Table(
            crate::valuemodels::TableValuation::new(2, alloc::vec![0.0; 4]).unwrap(),
        );
        assert!((learning_error(&LearnedValuation::Svr(shifted), &table, &sample).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn linear_prediction_example() {
        let model = LearnedValuation::Linear(LinearModel { weights: alloc::vec![1.0, 9.0], c: 1.0 });
        assert_eq!(model.predict(&Bundle::parse("01").unwrap()), 9.0);
    }
}
