use mlca_core::learning::KernelSpec;
use mlca_core::rng::Stream;
use mlca_core::valuemodels::DomainInstance;
use mlca_core::{Bundle, ReportSet};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Ridge regression weights from the dense normal equations `(XᵀX + I/c) w = Xᵀv`.
pub fn least_squares(reports: &ReportSet, m: usize, c: f64) -> Vec<f64> {
    let l = reports.len();
    let x = DMatrix::from_fn(l, m, |k, j| if reports.reports()[k].bundle.contains(j) { 1.0 } else { 0.0 });
    let v = DVector::from_iterator(l, reports.iter().map(|r| r.value));
    let a = x.transpose() * &x + DMatrix::identity(m, m) / c;
    let rhs = x.transpose() * v;
    a.lu().solve(&rhs).expect("regularised system is nonsingular").iter().copied().collect()
}

pub fn kernel_matrix(reports: &ReportSet, kernel: &KernelSpec) -> DMatrix<f64> {
    let xs: Vec<Bundle> = reports.bundles().collect();
    DMatrix::from_fn(xs.len(), xs.len(), |a, b| kernel.eval(&xs[a], &xs[b]))
}

/// `-½θᵀKθ - ε‖θ‖₁ + vᵀθ`.
pub fn svr_dual_objective(k: &DMatrix<f64>, v: &[f64], epsilon: f64, theta: &[f64]) -> f64 {
    let t = DVector::from_column_slice(theta);
    let quad = (t.transpose() * k * &t)[(0, 0)];
    let l1: f64 = theta.iter().map(|x| x.abs()).sum();
    let lin: f64 = theta.iter().zip(v).map(|(a, b)| a * b).sum();
    -0.5 * quad - epsilon * l1 + lin
}

/// Accelerated proximal gradient on the SVR dual over `θ = α - β ∈ [-c, c]^ℓ`.
/// Returns `(θ, objective)`.
pub fn svr_dual(reports: &ReportSet, kernel: &KernelSpec, epsilon: f64, c: f64) -> (Vec<f64>, f64) {
    let k = kernel_matrix(reports, kernel);
    let v: Vec<f64> = reports.iter().map(|r| r.value).collect();
    let l = v.len();
    let lmax = SymmetricEigen::new(k.clone()).eigenvalues.max().max(1e-12);
    let step = 1.0 / lmax;
    let vv = DVector::from_column_slice(&v);
    let prox = |z: f64| {
        let s = z.signum() * (z.abs() - step * epsilon).max(0.0);
        s.clamp(-c, c)
    };
    let mut theta = DVector::zeros(l);
    let mut y = theta.clone();
    let mut t = 1.0f64;
    for it in 0..2_000_000 {
        let grad = &vv - &k * &y;
        let next = DVector::from_iterator(l, (0..l).map(|a| prox(y[a] + step * grad[a])));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let change = (&next - &theta).amax();
        // restart when the momentum stops helping
        let restart = (&y - &next).dot(&(&next - &theta)) > 0.0;
        y = if restart { next.clone() } else { &next + (&next - &theta) * ((t - 1.0) / t_next) };
        t = if restart { 1.0 } else { t_next };
        theta = next;
        if change < 1e-13 && it > 10 {
            break;
        }
    }
    let th: Vec<f64> = theta.iter().copied().collect();
    let obj = svr_dual_objective(&k, &v, epsilon, &th);
    (th, obj)
}

/// SVR solved in the primal with an explicit feature map (linear and
/// quadratic kernels only), by ADMM on `½‖w‖² + c Σ max(0, |v - Φw| - ε)`.
pub struct FeatureSvr {
    pub kernel: KernelSpec,
    pub m: usize,
    pub w: Vec<f64>,
}

fn features(kernel: &KernelSpec, x: &Bundle, m: usize) -> Vec<f64> {
    let lin: Vec<f64> = (0..m).map(|j| if x.contains(j) { 1.0 } else { 0.0 }).collect();
    match *kernel {
        KernelSpec::Linear => lin,
        KernelSpec::Quadratic { lambda } => {
            let mut f = lin.clone();
            for j in 0..m {
                for k in 0..m {
                    f.push(lambda.sqrt() * lin[j] * lin[k]);
                }
            }
            f
        }
        _ => panic!("no finite feature map for {kernel:?}"),
    }
}

impl FeatureSvr {
    pub fn train(reports: &ReportSet, m: usize, kernel: KernelSpec, epsilon: f64, c: f64) -> Self {
        let rows: Vec<Vec<f64>> = reports.bundles().map(|b| features(&kernel, &b, m)).collect();
        let (l, d) = (rows.len(), rows[0].len());
        let phi = DMatrix::from_fn(l, d, |a, b| rows[a][b]);
        let v = DVector::from_iterator(l, reports.iter().map(|r| r.value));
        let gram = phi.transpose() * &phi;
        let factor = |rho: f64| (DMatrix::identity(d, d) + &gram * rho).cholesky().unwrap();
        let mut rho = 1.0;
        let mut sys = factor(rho);
        let mut w = DVector::zeros(d);
        let mut r = DVector::zeros(l);
        // scaled dual variable for the constraint v - Φw = r
        let mut u = DVector::zeros(l);
        for it in 0..400_000 {
            w = sys.solve(&(phi.transpose() * (&v - &r + &u) * rho));
            let pw = &phi * &w;
            // prox of (c/ρ)·max(0, |z| - ε)
            let t = c / rho;
            let r_new = DVector::from_iterator(
                l,
                (0..l).map(|a| {
                    let z = v[a] - pw[a] + u[a];
                    let abs = z.abs();
                    let shrunk = if abs <= epsilon { abs } else if abs <= epsilon + t { epsilon } else { abs - t };
                    z.signum() * shrunk
                }),
            );
            let dual_res = (phi.transpose() * (&r_new - &r) * rho).amax();
            r = r_new;
            u += &v - &pw - &r;
            let primal_res = (&v - &pw - &r).amax();
            if primal_res < 1e-12 && dual_res < 1e-11 {
                break;
            }
            // residual balancing
            if it % 50 == 49 {
                let scale = if primal_res > 10.0 * dual_res {
                    2.0
                } else if dual_res > 10.0 * primal_res {
                    0.5
                } else {
                    1.0
                };
                if scale != 1.0 {
                    rho *= scale;
                    u /= scale;
                    sys = factor(rho);
                }
            }
        }
        FeatureSvr { kernel, m, w: w.iter().copied().collect() }
    }

    pub fn predict(&self, x: &Bundle) -> f64 {
        features(&self.kernel, x, self.m).iter().zip(&self.w).map(|(a, b)| a * b).sum()
    }
}

/// Reserve prices recomputed from stored samples of the seeded stream.
pub fn recompute_reserves(domain: &DomainInstance, samples: usize) -> Vec<f64> {
    let m = domain.m;
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut stream = Stream::new(domain.seed, "cca/reserve", 0);
    let mut drawn = Vec::with_capacity(samples);
    while drawn.len() < samples {
        let i = stream.below(domain.n as u64) as usize;
        let mut b = 0;
        while b == 0 {
            b = stream.next_u64() & mask;
        }
        drawn.push((i, Bundle::from_bits(m, b)));
    }
    (0..m)
        .map(|j| {
            let shares: Vec<f64> = drawn
                .iter()
                .filter(|(_, b)| b.contains(j))
                .map(|(i, b)| domain.value(*i, b) / b.count() as f64)
                .collect();
            if shares.is_empty() {
                0.0
            } else {
                0.01 * shares.iter().sum::<f64>() / shares.len() as f64
            }
        })
        .collect()
}
