//! Experiment driver for the Schwarz preconditioner study: configuration,
//! batch table runs, mesh sweeps, spectrum dumps and the property verifier.

pub mod config;
pub mod csvio;
pub mod experiment;

pub use config::{ExperimentConfig, ProblemSettings, Profile, TestId};
pub use csvio::TableRow;
pub use experiment::{RunError, RunResult};
