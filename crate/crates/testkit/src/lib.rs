//! Independent oracles for testing: brute-force winner determination and
//! payments, dense numerical solvers for the learners, and random instances.

pub mod random;
pub mod solvers;
pub mod wdp;

pub use random::{random_reports, rng};
pub use solvers::{kernel_matrix, least_squares, recompute_reserves, svr_dual, svr_dual_objective, FeatureSvr};
pub use wdp::{brute_force_learned_wdp, brute_force_report_wdp, brute_force_vcg};
pub use rand;
pub use rand_chacha::ChaCha8Rng;
