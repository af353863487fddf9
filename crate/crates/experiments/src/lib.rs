//! Experiment harness for `korobov-relu`: approximation- and learning-rate
//! sweeps, the covering check and an inequality suite, with CSV, SVG and JSON
//! reporting.

pub mod checks;
pub mod config;
pub mod error;
pub mod fit;
pub mod output;
pub mod run;
pub mod theory;

pub use config::{Constants, ExperimentConfig, ExperimentKind, Exponent};
pub use error::{ExpError, Result};
pub use fit::{fit_rate, RateFit};
pub use output::Row;
pub use run::{run, run_and_write, Outcome, Report, RunOptions};
