//! Simulation harness: transcript ledger, experiment configs and runners.

pub mod config;
pub mod experiments;
pub mod ledger;

pub use config::ExperimentConfig;
pub use experiments::{render, run_experiment, EXPERIMENTS};
pub use ledger::{measure_cpop, Direction, Endpoint, LedgerEntry, MessageKind, Scope, TranscriptLedger};
