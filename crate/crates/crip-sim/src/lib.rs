//! Config-driven experiment runner: strict TOML configs, deterministic CSV
//! and JSON artifacts, a bundled registry of reference experiments.

pub mod config;
pub mod experiments;
pub mod output;
pub mod run;

mod error;

pub use config::{parse_config, to_toml, validate, ExperimentConfig, Kind};
pub use error::Error;
pub use experiments::{lookup, EXPERIMENTS};
pub use run::{run, RunOutcome};
