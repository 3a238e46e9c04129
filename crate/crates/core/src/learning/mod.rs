//! Value-function learners: kernels, ridge-style linear regression and
//! bias-free ε-insensitive support vector regression.

mod kernel;
mod linear;
mod model;
mod svr;

pub use kernel::{kernel_eval, KernelSpec};
pub use linear::{train_linear, LinearModel};
pub use model::{default_error_sample, learning_error, train, LearnedValuation, LearnerSpec};
pub use svr::{train_svr, train_svr_with, SvrModel, SvrParams};
