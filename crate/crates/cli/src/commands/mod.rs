//! The four experiment commands. Each returns a [`Report`]; writing it is
//! left to the caller.

pub mod crossratio;
pub mod discrepancy;
pub mod exponents;
pub mod tune;

use scl_core::map::{tune_parameter, TunedMap};
use scl_core::{Error, RotationTarget};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Tune,
    Exponents,
    Discrepancy,
    CrossratioCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Tune => "tune",
            Command::Exponents => "exponents",
            Command::Discrepancy => "discrepancy",
            Command::CrossratioCheck => "crossratio-check",
        }
    }
}

/// Validates `config` and runs `command`.
pub fn execute(command: Command, config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    match command {
        Command::Tune => tune::run(config),
        Command::Exponents => exponents::run(config),
        Command::Discrepancy => discrepancy::run(config),
        Command::CrossratioCheck => crossratio::run(config),
    }
}

/// A tuned map with the depths actually usable.
pub(crate) struct Prepared {
    pub target: RotationTarget,
    pub tuned: TunedMap,
    pub depth: usize,
}

/// Builds the target and tunes the map, shortening the run if the target
/// cannot be resolved that deep.
pub(crate) fn prepare(config: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Prepared> {
    let target = config.rotation_target()?;
    let mut tune_depth = config.tune_depth();
    let mut depth = config.depth;
    if target.depth() < tune_depth + 1 {
        if !config.guards.truncate_at_precision_limit || target.depth() < 3 {
            return Err(Error::InsufficientDepth { requested: tune_depth + 1, available: target.depth() }.into());
        }
        tune_depth = target.depth() - 1;
        depth = depth.min(tune_depth);
        warnings.push(format!("truncated at level {depth}: rotation number resolved to {} levels", target.depth()));
    }
    let tuned = tune_parameter(config.family, &target, tune_depth, 1e-16)?;
    Ok(Prepared { target, tuned, depth })
}

/// Runs `f` at `depth`, retrying shallower when a level falls below the
/// precision cutoff and the guard allows it.
pub(crate) fn with_precision_guard<T>(
    config: &ExperimentConfig,
    depth: usize,
    min_depth: usize,
    warnings: &mut Vec<String>,
    mut f: impl FnMut(usize) -> scl_core::Result<T>,
) -> Result<(T, usize)> {
    let mut depth = depth;
    loop {
        match f(depth) {
            Ok(v) => return Ok((v, depth)),
            Err(Error::DepthExceedsPrecision { level, length })
                if config.guards.truncate_at_precision_limit && level > min_depth && level <= depth =>
            {
                warnings.push(format!("truncated at level {}: atom length {length:e} below the precision cutoff", level - 1));
                depth = level - 1;
            }
            Err(e) => return Err(CliError::Core(e)),
        }
    }
}
