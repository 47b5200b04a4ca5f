//! Experiment runner for the six model examples: per-mode solves, bounds,
//! references and result tables.

pub mod config;
pub mod data;
pub mod reference;
pub mod run;
pub mod table;

pub use run::{run, ExperimentConfig, ReferenceMode, RunOutput, SolverKind};
pub use table::TableRow;
