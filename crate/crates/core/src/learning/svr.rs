use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::KernelSpec;
use crate::{Bundle, Error, ReportSet, Result};

/// Hyperparameters and stopping rule of the SVR dual solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub kernel: KernelSpec,
    pub epsilon: f64,
    pub c: f64,
    /// Stop once the largest KKT violation is at most this.
    pub tolerance: f64,
    /// Cap on sweeps; one sweep is `ℓ` pair updates.
    pub max_sweeps: u64,
}

impl SvrParams {
    pub fn new(kernel: KernelSpec, epsilon: f64, c: f64) -> Self {
        SvrParams { kernel, epsilon, c, tolerance: 1e-7, max_sweeps: 1_000_000 }
    }
}

/// A trained SVR: `ṽ(x) = Σ_k (α_k - β_k) κ(x, x_k)` over the support vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: KernelSpec,
    pub epsilon: f64,
    pub c: f64,
    pub support_vectors: Vec<Bundle>,
    pub coeffs: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Dual objective at the returned point.
    pub objective: f64,
    /// Largest KKT violation at the returned point.
    pub kkt_violation: f64,
    pub sweeps: u64,
    pub converged: bool,
}

impl SvrModel {
    pub fn predict(&self, x: &Bundle) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coeffs)
            .map(|(sv, c)| c * self.kernel.eval(x, sv))
            .sum()
    }
}

pub fn train_svr(reports: &ReportSet, m: usize, kernel: KernelSpec, epsilon: f64, c: f64) -> Result<SvrModel> {
    train_svr_with(reports, m, &SvrParams::new(kernel, epsilon, c))
}

/// Violation of the optimality conditions for coordinate `θ_k` of
/// `max -½θᵀKθ - ε‖θ‖₁ + vᵀθ` over `θ ∈ [-c, c]`, given `g = v_k - (Kθ)_k`.
#[inline]
fn violation(theta: f64, g: f64, eps: f64, c: f64) -> f64 {
    if theta == 0.0 {
        (g.abs() - eps).max(0.0)
    } else if theta >= c {
        (eps - g).max(0.0)
    } else if theta <= -c {
        (g + eps).max(0.0)
    } else if theta > 0.0 {
        (g - eps).abs()
    } else {
        (g + eps).abs()
    }
}

/// Trains a bias-free ε-insensitive SVR by maximizing the dual
///
/// `-½ Σ_kk' (α_k-β_k)(α_k'-β_k') κ(x_k,x_k') - ε Σ_k (α_k+β_k) + Σ_k v_k (α_k-β_k)`
///
/// over `α, β ∈ [0, c]`. Each step picks the training point with the largest
/// KKT violation and solves its `(α_k, β_k)` pair exactly. An empty training
/// set yields the zero model.
pub fn train_svr_with(reports: &ReportSet, m: usize, params: &SvrParams) -> Result<SvrModel> {
    params.kernel.validate()?;
    let SvrParams { kernel, epsilon: eps, c, tolerance, max_sweeps } = *params;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("epsilon must be non-negative, got {eps}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("c must be positive, got {c}")));
    }
    let xs: Vec<Bundle> = reports.bundles().collect();
    let v: Vec<f64> = reports.iter().map(|r| r.value).collect();
    if let Some(b) = xs.iter().find(|b| b.width() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: b.width() });
    }
    let l = xs.len();
    let mut k = alloc::vec![0.0; l * l];
    for a in 0..l {
        for b in 0..=a {
            let e = kernel.eval(&xs[a], &xs[b]);
            if !e.is_finite() {
                return Err(Error::NumericOverflow("evaluating the kernel matrix".into()));
            }
            k[a * l + b] = e;
            k[b * l + a] = e;
        }
    }

    let mut theta = alloc::vec![0.0; l];
    let mut g = v.clone();
    let max_updates = max_sweeps.saturating_mul(l.max(1) as u64);
    let refresh = (10 * l).max(1000) as u64;
    let mut updates = 0u64;
    let mut worst;
    loop {
        let mut pick = usize::MAX;
        worst = 0.0;
        for p in 0..l {
            let viol = violation(theta[p], g[p], eps, c);
            if viol > worst {
                worst = viol;
                pick = p;
            }
        }
        if worst <= tolerance || updates >= max_updates {
            break;
        }
        let kpp = k[pick * l + pick];
        let gp = g[pick] + kpp * theta[pick];
        let target = if kpp > 1e-300 {
            let shrunk = gp.abs() - eps;
            if shrunk <= 0.0 {
                0.0
            } else {
                (gp.signum() * shrunk / kpp).clamp(-c, c)
            }
        } else if gp.abs() > eps {
            gp.signum() * c
        } else {
            0.0
        };
        let delta = target - theta[pick];
        theta[pick] = target;
        if delta != 0.0 {
            let row = &k[pick * l..(pick + 1) * l];
            for (gq, kq) in g.iter_mut().zip(row) {
                *gq -= delta * kq;
            }
        }
        updates += 1;
        if updates.is_multiple_of(refresh) {
            for p in 0..l {
                let row = &k[p * l..(p + 1) * l];
                g[p] = v[p] - row.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>();
            }
        }
    }

    let mut objective = 0.0;
    for p in 0..l {
        let kt: f64 = k[p * l..(p + 1) * l].iter().zip(&theta).map(|(a, b)| a * b).sum();
        objective += -0.5 * theta[p] * kt - eps * theta[p].abs() + v[p] * theta[p];
    }
    let mut model = SvrModel {
        kernel,
        epsilon: eps,
        c,
        support_vectors: Vec::new(),
        coeffs: Vec::new(),
        alpha: Vec::new(),
        beta: Vec::new(),
        objective,
        kkt_violation: worst,
        sweeps: updates.div_ceil(l.max(1) as u64),
        converged: worst <= tolerance,
    };
    for p in 0..l {
        if theta[p].abs() > 1e-10 {
            model.support_vectors.push(xs[p]);
            model.coeffs.push(theta[p]);
            model.alpha.push(theta[p].max(0.0));
            model.beta.push((-theta[p]).max(0.0));
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BundleValueReport;

    fn reports(pairs: &[(&str, f64)]) -> ReportSet {
        ReportSet::from_reports(pairs.iter().map(|(b, v)| BundleValueReport::new(Bundle::parse(b).unwrap(), *v)))
            .unwrap()
    }

    #[test]
    fn interpolates_single_point() {
        let r = reports(&[("10", 5.0)]);
        let model = train_svr(&r, 2, KernelSpec::Linear, 0.0, 1e6).unwrap();
        assert!((model.predict(&Bundle::parse("10").unwrap()) - 5.0).abs() < 1e-3);
    }

    #[test]
    fn zero_targets_give_zero_model() {
        let r = reports(&[("10", 0.0), ("11", 0.0)]);
        let model = train_svr(&r, 2, KernelSpec::Quadratic { lambda: 1.0 }, 0.0, 10.0).unwrap();
        assert!(model.support_vectors.is_empty());
        assert_eq!(model.predict(&Bundle::parse("11").unwrap()), 0.0);
    }

    #[test]
    fn box_constraint_binds_for_small_c() {
        let r = reports(&[("1", 100.0)]);
        let model = train_svr(&r, 1, KernelSpec::Linear, 0.0, 2.0).unwrap();
        assert_eq!(model.alpha, [2.0]);
        assert_eq!(model.beta, [0.0]);
        assert!(model.converged);
    }

    #[test]
    fn epsilon_band() {
        let r = reports(&[("10", 5.0), ("01", 1.0), ("11", 7.0)]);
        let model = train_svr(&r, 2, KernelSpec::Linear, 0.5, 1e4).unwrap();
        assert!(model.converged);
        for rep in r.iter() {
            assert!((model.predict(&rep.bundle) - rep.value).abs() <= 0.5 + 1e-4);
        }
    }

    #[test]
    fn overflowing_kernel_is_reported() {
        let r = reports(&[("1111", 1.0)]);
        let e = train_svr(&r, 4, KernelSpec::Exponential { lambda: 1e-3 }, 0.0, 1.0);
        assert!(matches!(e, Err(Error::NumericOverflow(_))));
    }
}
