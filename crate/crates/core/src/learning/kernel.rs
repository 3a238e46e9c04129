use serde::{Deserialize, Serialize};

use crate::{Bundle, Error, Result};

/// Kernel on bundle indicator vectors.
///
/// Dot-product kernels depend on `s = x·x'`; the Gaussian kernel depends on
/// the Hamming distance `h = |x ⊕ x'|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `s`
    Linear,
    /// `s + λ s²`
    Quadratic { lambda: f64 },
    /// `exp(s / λ)`
    Exponential { lambda: f64 },
    /// `exp(-h / λ)`
    Gaussian { lambda: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Quadratic { lambda } if lambda.is_finite() && lambda >= 0.0 => Ok(()),
            KernelSpec::Exponential { lambda } | KernelSpec::Gaussian { lambda }
                if lambda.is_finite() && lambda > 0.0 =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidParameter(alloc::format!("invalid kernel parameter in {self:?}"))),
        }
    }

    /// Whether the kernel depends on the Hamming distance rather than the dot product.
    pub fn is_rbf(&self) -> bool {
        matches!(self, KernelSpec::Gaussian { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Quadratic { .. } => "quadratic",
            KernelSpec::Exponential { .. } => "exponential",
            KernelSpec::Gaussian { .. } => "gaussian",
        }
    }

    /// The kernel as a function of the integer statistic `τ` (dot product or
    /// Hamming distance).
    #[inline]
    pub fn profile(&self, tau: u32) -> f64 {
        let t = tau as f64;
        match *self {
            KernelSpec::Linear => t,
            KernelSpec::Quadratic { lambda } => t + lambda * t * t,
            KernelSpec::Exponential { lambda } => libm::exp(t / lambda),
            KernelSpec::Gaussian { lambda } => libm::exp(-t / lambda),
        }
    }

    #[inline]
    pub fn tau(&self, x: &Bundle, y: &Bundle) -> u32 {
        if self.is_rbf() {
            x.hamming(y)
        } else {
            x.dot(y)
        }
    }

    #[inline]
    pub fn eval(&self, x: &Bundle, y: &Bundle) -> f64 {
        self.profile(self.tau(x, y))
    }
}

/// Evaluates `κ(x, x')`, validating the kernel parameters.
pub fn kernel_eval(spec: &KernelSpec, x: &Bundle, y: &Bundle) -> Result<f64> {
    spec.validate()?;
    if x.width() != y.width() {
        return Err(Error::DimensionMismatch { expected: x.width(), found: y.width() });
    }
    Ok(spec.eval(x, y))
}
