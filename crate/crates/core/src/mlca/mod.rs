//! The MLCA mechanism: ML-powered query module, round loop, core-selecting
//! payments and the social-welfare-alignment diagnostic.

mod config;
mod oracle;
mod payments;
mod query;
mod run;
mod swa;

pub use config::MlcaConfig;
pub use oracle::WelfareOracle;
pub use payments::{nearest_core_point, vcg_nearest_payments, MAX_CORE_BIDDERS};
pub use query::{next_queries, train_models, QueryProfile};
pub use run::{
    replay, run_mlca, run_mlca_observed, EconomyRecord, MlcaObserver, MlcaRound, MlcaTrace, Provenance, QueryRecord,
};
pub use swa::{swa_compare, swa_diagnostic, SwaReport};
