//! Experiment configuration: one JSON file, every field optional, command
//! line flags applied on top.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scl_core::cf::NAMED_CF_LENGTH;
use scl_core::{ContinuedFraction, Execution, Family, RotationNumber, RotationTarget};

use crate::error::{CliError, Result};

/// Named constants must expand to at least this many coefficients.
pub const MIN_NAMED_LENGTH: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Named(String),
    Coefficients(Vec<u64>),
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::Named("golden".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Guards {
    /// Run at the deepest level the precision allows, with a warning,
    /// instead of failing.
    pub truncate_at_precision_limit: bool,
}

impl Default for Guards {
    fn default() -> Self {
        Self { truncate_at_precision_limit: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepCounts {
    pub identity: usize,
    pub quadrature: usize,
    pub expansion: usize,
    pub cubic_integrand: usize,
}

impl Default for SweepCounts {
    fn default() -> Self {
        Self { identity: 10_000, quadrature: 100, expansion: 1_000, cubic_integrand: 1_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub target: TargetSpec,
    /// Deepest partition level `n_max`.
    pub depth: usize,
    /// Tuning depth; `depth + 6` when absent.
    pub tune_depth: Option<usize>,
    /// First level of the exponent traces.
    pub n_min: usize,
    /// First level of the singularity profile.
    pub profile_min_level: usize,
    /// Refinement step of the discrepancy experiment.
    pub r: usize,
    /// Extra steps reported by the discrepancy survey.
    pub refinement_steps: Vec<usize>,
    /// Coarse levels of the discrepancy survey.
    pub discrepancy_levels: (usize, usize),
    pub samples_mu: usize,
    pub samples_lebesgue: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub execution: Execution,
    pub guards: Guards,
    pub sweeps: SweepCounts,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::CriticalSine,
            target: TargetSpec::default(),
            depth: 14,
            tune_depth: None,
            n_min: 2,
            profile_min_level: 6,
            r: 2,
            refinement_steps: vec![1, 2, 3],
            discrepancy_levels: (3, 7),
            samples_mu: 200,
            samples_lebesgue: 200,
            seed: 1,
            out: PathBuf::from("out"),
            execution: Execution::Parallel,
            guards: Guards::default(),
            sweeps: SweepCounts::default(),
        }
    }
}

/// Flags that override config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigParse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = o.depth {
            self.depth = d;
        }
        if let Some(n) = o.samples {
            self.samples_mu = n;
            self.samples_lebesgue = n;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
    }

    pub fn tune_depth(&self) -> usize {
        self.tune_depth.unwrap_or(self.depth + 6)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 2 {
            return Err(CliError::config("depth", format!("must be at least 2, got {}", self.depth)));
        }
        if self.tune_depth() < self.depth {
            return Err(CliError::config("tune_depth", "must be at least depth"));
        }
        if self.samples_mu == 0 {
            return Err(CliError::config("samples_mu", "must be at least 1"));
        }
        if self.samples_lebesgue == 0 {
            return Err(CliError::config("samples_lebesgue", "must be at least 1"));
        }
        if self.n_min == 0 || self.n_min > self.depth {
            return Err(CliError::config("n_min", format!("must lie in 1..={}", self.depth)));
        }
        if self.r == 0 || self.refinement_steps.contains(&0) {
            return Err(CliError::config("r", "refinement steps must be at least 1"));
        }
        let (lo, hi) = self.discrepancy_levels;
        if lo == 0 || lo > hi {
            return Err(CliError::config("discrepancy_levels", format!("bad range ({lo}, {hi})")));
        }
        self.continued_fraction()?;
        Ok(())
    }

    pub fn continued_fraction(&self) -> Result<ContinuedFraction> {
        match &self.target {
            TargetSpec::Named(name) => {
                let cf = match name.as_str() {
                    "golden" => ContinuedFraction::golden(NAMED_CF_LENGTH),
                    "silver" => ContinuedFraction::silver(NAMED_CF_LENGTH),
                    other => return Err(CliError::config("target", format!("unknown constant {other:?}; use \"golden\", \"silver\" or a coefficient list"))),
                };
                debug_assert!(cf.len() >= MIN_NAMED_LENGTH);
                Ok(cf)
            }
            TargetSpec::Coefficients(a) => {
                ContinuedFraction::from_coefficients(a.clone()).map_err(|e| CliError::config("target", e.to_string()))
            }
        }
    }

    /// The rotation target, as deep as tuning needs or the precision allows.
    pub fn rotation_target(&self) -> Result<RotationTarget> {
        let cf = self.continued_fraction()?;
        let rho = match &self.target {
            TargetSpec::Named(n) if n == "golden" => RotationNumber::golden(),
            TargetSpec::Named(_) => RotationNumber::silver(),
            TargetSpec::Coefficients(_) => RotationNumber::from_cf(&cf)?,
        };
        let want = self.tune_depth() + 1;
        Ok(RotationTarget::deepest(cf, rho, want)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), c);
        c.validate().unwrap();
    }

    #[test]
    fn explicit_coefficients() {
        let c = ExperimentConfig::from_json(r#"{"target": [1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2], "depth": 8}"#).unwrap();
        c.validate().unwrap();
        assert_eq!(c.rotation_target().unwrap().q(3), 4);
    }

    #[test]
    fn validation_names_fields() {
        let bad = ExperimentConfig::from_json(r#"{"target": [1, 0, 2]}"#).unwrap();
        match bad.validate() {
            Err(CliError::Config { field, .. }) => assert_eq!(field, "target"),
            other => panic!("{other:?}"),
        }
        let bad = ExperimentConfig { depth: 1, ..Default::default() };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        assert!(ExperimentConfig::from_json(r#"{"sample": 3}"#).is_err());
    }

    #[test]
    fn overrides_win() {
        let mut c = ExperimentConfig::default();
        c.apply(&Overrides { seed: Some(9), depth: Some(10), samples: Some(5), out: None });
        assert_eq!((c.seed, c.depth, c.samples_mu, c.samples_lebesgue, c.tune_depth()), (9, 10, 5, 5, 16));
    }
}
