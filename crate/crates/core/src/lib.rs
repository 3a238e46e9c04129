//! Machine-learning-powered iterative combinatorial auction (MLCA).
//!
//! The crate is `no_std` with `alloc`. Enabling the default `std` feature adds
//! wall-clock time limits to the winner-determination solvers; without it only
//! node limits are enforced.
//!
//! Module map:
//!
//! - [`bundle`], [`report`], [`allocation`], [`auction`]: bundles, reports,
//!   allocations, report-restricted winner determination and VCG payments.
//! - [`valuemodels`]: GSVM and 2-wise value models, domain generators, true
//!   demand, bidder strategies.
//! - [`learning`]: kernels, linear regression and bias-free ε-insensitive SVR.
//! - [`wdp`]: exact winner determination over learned value models.
//! - [`mlca`]: the query module, the auction loop and core-selecting payments.
//! - [`cca`]: the combinatorial clock auction baseline.
//! - [`diagnostics`]: efficiency-loss bounds and clearing-price certificates.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod allocation;
pub mod auction;
pub mod bundle;
pub mod cca;
pub mod diagnostics;
mod error;
pub mod learning;
pub(crate) mod linalg;
pub mod mlca;
pub mod outcome;
pub mod report;
pub mod rng;
pub mod valuemodels;
pub mod wdp;

pub use allocation::{feasible, Allocation, EconomyIndex, Payments};
pub use auction::{
    efficiency, reported_welfare, social_welfare, utility, vcg_payments_on_reports,
    wdp_over_reports, ReportedOptimum, VcgOutcome,
};
pub use bundle::Bundle;
pub use error::{Error, Result};
pub use outcome::{AuctionOutcome, PaymentRule, Trace};
pub use report::{BundleValueReport, ReportSet};

/// Absolute tolerance used when comparing welfare values.
pub const WELFARE_TOL: f64 = 1e-9;
