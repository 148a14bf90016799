//! Experiment runner for the circle-map laboratory: configuration, the
//! `tune`, `exponents`, `discrepancy` and `crossratio-check` commands, and
//! reproducible CSV/JSON reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{execute, Command};
pub use config::{ExperimentConfig, Overrides};
pub use error::{CliError, Result};
pub use report::Report;

/// Caps the global rayon pool at `SCL_THREADS` threads when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("SCL_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config("SCL_THREADS", format!("expected a positive integer, got {value:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
