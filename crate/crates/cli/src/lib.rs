//! Command-line front end for `arima-ao`: CSV ingestion, model fitting,
//! additive outlier detection and simulation.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod report;

pub use error::{CliError, CliResult};
