//! Per-bidder objective encodings used by the solvers.

use alloc::vec::Vec;

use crate::bundle::bit_iter;
use crate::learning::{KernelSpec, LearnedValuation, SvrModel};
use crate::valuemodels::{BidderValuation, QuadraticForm};

/// Kernel expansion `Σ_k c_k κ̄(τ_k(a))`, where `τ_k` is the dot product with
/// (or Hamming distance to) support vector `k`; this is the z-encoding with
/// one indicator per `(k, τ)`.
#[derive(Clone, Debug)]
pub struct KernelTerms {
    pub kernel: KernelSpec,
    pub m: usize,
    pub svs: Vec<u64>,
    pub coeffs: Vec<f64>,
    /// `κ̄(τ)` for `τ = 0..=m`.
    pub profile: Vec<f64>,
}

impl KernelTerms {
    pub fn from_svr(s: &SvrModel, m: usize) -> Self {
        KernelTerms {
            kernel: s.kernel,
            m,
            svs: s.support_vectors.iter().map(|b| b.bits()).collect(),
            coeffs: s.coeffs.clone(),
            profile: (0..=m as u32).map(|t| s.kernel.profile(t)).collect(),
        }
    }

    /// The `τ` selected by the link constraint for term `k` when the bidder gets `bits`.
    #[inline]
    pub fn tau(&self, k: usize, bits: u64) -> u32 {
        if self.kernel.is_rbf() {
            (self.svs[k] ^ bits).count_ones()
        } else {
            (self.svs[k] & bits).count_ones()
        }
    }

    /// Largest `τ` index carried by term `k`: `|x_k|` for dot-product kernels, `m` for RBF.
    pub fn tau_max(&self, k: usize) -> u32 {
        if self.kernel.is_rbf() {
            self.m as u32
        } else {
            self.svs[k].count_ones()
        }
    }

    pub fn value(&self, bits: u64) -> f64 {
        (0..self.svs.len()).map(|k| self.coeffs[k] * self.profile[self.tau(k, bits) as usize]).sum()
    }

    /// Term-wise bound: each term maximized over the `τ` values reachable
    /// when `assigned` items are in, `decided_out` items are out and `free`
    /// items may go either way.
    pub fn bound(&self, assigned: u64, decided_out: u64, free: u64) -> f64 {
        let nfree = free.count_ones();
        let mut total = 0.0;
        for k in 0..self.svs.len() {
            let x = self.svs[k];
            let (lo, hi) = if self.kernel.is_rbf() {
                let fixed = (x & decided_out).count_ones() + (assigned & !x).count_ones();
                (fixed, fixed + nfree)
            } else {
                let fixed = (x & assigned).count_ones();
                (fixed, fixed + (x & free).count_ones())
            };
            let c = self.coeffs[k];
            let mut best = f64::NEG_INFINITY;
            for t in lo..=hi {
                best = best.max(c * self.profile[t as usize]);
            }
            total += best;
        }
        total
    }
}

#[derive(Clone, Debug)]
pub enum Encoding {
    /// `w · x`
    Linear(Vec<f64>),
    /// Quadratic pseudo-Boolean form, plus the kernel terms it was expanded
    /// from when it comes from a quadratic-kernel SVR.
    Quadratic { form: QuadraticForm, terms: Option<KernelTerms> },
    Kernel(KernelTerms),
    /// Value table over all masks (explicit valuations); enumeration only.
    Table(Vec<f64>),
}

impl Encoding {
    pub fn from_model(model: &LearnedValuation, m: usize) -> Self {
        match model {
            LearnedValuation::Linear(l) => Encoding::Linear(l.weights.clone()),
            LearnedValuation::Svr(s) => match s.kernel {
                KernelSpec::Linear => {
                    let mut w = alloc::vec![0.0; m];
                    for (sv, c) in s.support_vectors.iter().zip(&s.coeffs) {
                        for j in sv.items() {
                            w[j] += c;
                        }
                    }
                    Encoding::Linear(w)
                }
                KernelSpec::Quadratic { lambda } => {
                    let mut form = QuadraticForm::zeros(m);
                    for (sv, c) in s.support_vectors.iter().zip(&s.coeffs) {
                        let items: Vec<usize> = sv.items().collect();
                        for (a, &j) in items.iter().enumerate() {
                            form.linear[j] += c * (1.0 + lambda);
                            for &k in &items[a + 1..] {
                                let w = form.pair(j, k) + 2.0 * lambda * c;
                                form.set_pair(j, k, w);
                            }
                        }
                    }
                    Encoding::Quadratic { form, terms: Some(KernelTerms::from_svr(s, m)) }
                }
                KernelSpec::Exponential { .. } | KernelSpec::Gaussian { .. } => {
                    Encoding::Kernel(KernelTerms::from_svr(s, m))
                }
            },
            LearnedValuation::Oracle(v) => match v.quadratic_form() {
                Some(form) => Encoding::Quadratic { form, terms: None },
                None => match v {
                    BidderValuation::Table(t) => Encoding::Table(t.values.clone()),
                    _ => unreachable!("structured valuations have quadratic forms"),
                },
            },
        }
    }

    #[inline]
    pub fn value(&self, bits: u64) -> f64 {
        match self {
            Encoding::Linear(w) => bit_iter(bits).map(|j| w[j]).sum(),
            Encoding::Quadratic { form, .. } => form.value(bits),
            Encoding::Kernel(t) => t.value(bits),
            Encoding::Table(v) => v[bits as usize],
        }
    }

    pub fn supports_branch_and_bound(&self) -> bool {
        !matches!(self, Encoding::Table(_))
    }

    /// Absolute objective weight attached to item `j`, used to order branching.
    pub fn influence(&self, j: usize) -> f64 {
        match self {
            Encoding::Linear(w) => w[j].abs(),
            Encoding::Quadratic { form, .. } => {
                form.linear[j].abs() + (0..form.m).map(|k| form.pair(j, k).abs()).sum::<f64>()
            }
            Encoding::Kernel(t) => t
                .svs
                .iter()
                .zip(&t.coeffs)
                .filter(|(x, _)| t.kernel.is_rbf() || *x >> j & 1 == 1)
                .map(|(_, c)| c.abs())
                .sum(),
            Encoding::Table(_) => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::{train_svr, LearnedValuation};
    use crate::{Bundle, BundleValueReport, ReportSet};

    #[test]
    fn link_constraint_arithmetic() {
        let m = 3;
        let sv = Bundle::from_items(m, [0, 1]);
        let mk = |kernel| KernelTerms {
            kernel,
            m,
            svs: alloc::vec![sv.bits()],
            coeffs: alloc::vec![1.0],
            profile: (0..=m as u32).map(|t| KernelSpec::profile(&kernel, t)).collect(),
        };
        let dot = mk(KernelSpec::Exponential { lambda: 1.0 });
        assert_eq!(dot.tau(0, Bundle::from_items(m, [0, 2]).bits()), 1);
        assert_eq!(dot.tau_max(0), 2);
        let rbf = mk(KernelSpec::Gaussian { lambda: 1.0 });
        assert_eq!(rbf.tau(0, Bundle::from_items(m, [1, 2]).bits()), 2);
        assert_eq!(rbf.tau_max(0), 3);
    }

    #[test]
    fn quadratic_expansion_matches_kernel_sum() {
        let m = 5;
        let r = ReportSet::from_reports(
            [("11000", 3.0), ("01110", 5.0), ("10101", 2.0), ("00011", 0.0)]
                .iter()
                .map(|(b, v)| BundleValueReport::new(Bundle::parse(b).unwrap(), *v)),
        )
        .unwrap();
        let s = train_svr(&r, m, KernelSpec::Quadratic { lambda: 0.3 }, 0.1, 10.0).unwrap();
        let model = LearnedValuation::Svr(s);
        let enc = Encoding::from_model(&model, m);
        for b in Bundle::all(m) {
            assert!((enc.value(b.bits()) - model.predict(&b)).abs() < 1e-9);
        }
    }
}
