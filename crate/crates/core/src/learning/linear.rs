use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::cholesky_solve;
use crate::{Bundle, Error, ReportSet, Result};

/// `ṽ(x) = w · x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub c: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &Bundle) -> f64 {
        x.items().map(|j| self.weights[j]).sum()
    }
}

/// Minimizes `c Σ_k (v_k - w·x_k)² + ‖w‖²` via the normal equations
/// `(XᵀX + I/c) w = Xᵀv`. An empty training set yields `w = 0`.
pub fn train_linear(reports: &ReportSet, m: usize, c: f64) -> Result<LinearModel> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("regularization c must be positive, got {c}")));
    }
    let mut a = alloc::vec![0.0; m * m];
    let mut rhs = alloc::vec![0.0; m];
    for r in reports {
        if r.bundle.width() != m {
            return Err(Error::DimensionMismatch { expected: m, found: r.bundle.width() });
        }
        for j in r.bundle.items() {
            rhs[j] += r.value;
            for k in r.bundle.items() {
                a[j * m + k] += 1.0;
            }
        }
    }
    for j in 0..m {
        a[j * m + j] += 1.0 / c;
    }
    let weights = cholesky_solve(&a, &rhs, m)
        .ok_or_else(|| Error::NumericOverflow("factorizing the normal equations".into()))?;
    Ok(LinearModel { weights, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BundleValueReport;

    #[test]
    fn fits_exact_data_with_weak_regularization() {
        let r = ReportSet::from_reports([
            BundleValueReport::new(Bundle::parse("10").unwrap(), 1.0),
            BundleValueReport::new(Bundle::parse("11").unwrap(), 10.0),
        ])
        .unwrap();
        let w = train_linear(&r, 2, 1e9).unwrap().weights;
        assert!((w[0] - 1.0).abs() < 1e-6 && (w[1] - 9.0).abs() < 1e-6);
    }

    #[test]
    fn empty_training_set_gives_zero_model() {
        let w = train_linear(&ReportSet::new(), 3, 1.0).unwrap().weights;
        assert_eq!(w, [0.0; 3]);
    }
}
