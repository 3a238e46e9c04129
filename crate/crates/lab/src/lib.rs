//! Experiment harness for the MLCA laboratory: seeded batches comparing MLCA
//! with the clock auction and benchmarks, kernel grids, manipulation studies,
//! and the JSON/CSV file formats used by the `mlca` command.

pub mod batch;
pub mod config;
pub mod formats;
pub mod grid;
pub mod manipulation;
pub mod stats;

pub use batch::{run_batch, run_seed, Hooks, ResultRow, SeedRecord};
pub use config::{DomainKind, DomainSpec, ExperimentConfig, Mechanism, MlcaSettings, SeedRange};
pub use grid::{kernel_grid, GridConfig, GridRow};
pub use manipulation::{manipulation_study, ManipulationReport, ManipulationRun};
