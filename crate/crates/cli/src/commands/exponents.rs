use serde::{Deserialize, Serialize};

use scl_core::measure::{
    conjugacy_tower, estimate_exponents_in, gamma_exponents, hausdorff_estimate, profile_from_tower, ExponentEstimate,
    HausdorffEstimate, ProfileLevel, SamplingMeasure,
};

use super::{prepare, with_precision_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{fmt_f, Report, Stopwatch, Table};

/// Levels compared at each end of a trace.
pub const EDGE_LEVELS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub measure: SamplingMeasure,
    pub reciprocal: bool,
    pub samples: usize,
    pub mean_final: f64,
    pub tail_mean: f64,
    pub tail_min: f64,
    pub tail_max: f64,
    /// Mean distance of the level means from 1 over the first and last
    /// [`EDGE_LEVELS`] levels.
    pub first_distance: f64,
    pub last_distance: f64,
}

impl MeasureSummary {
    fn of(e: &ExponentEstimate) -> Self {
        let (first_distance, last_distance) = e.edge_distances(EDGE_LEVELS);
        Self {
            measure: e.sampling_measure,
            reciprocal: e.reciprocal,
            samples: e.sequences.len(),
            mean_final: e.mean_final,
            tail_mean: e.tail_mean,
            tail_min: e.tail_min,
            tail_max: e.tail_max,
            first_distance,
            last_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentsSummary {
    pub omega: f64,
    pub depth: usize,
    pub lebesgue: MeasureSummary,
    pub mu: MeasureSummary,
    pub gamma_lebesgue: MeasureSummary,
    pub gamma_mu: MeasureSummary,
    pub hausdorff: HausdorffEstimate,
    pub profile: Vec<ProfileLevel>,
    pub profile_strictly_decreasing: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let mut clock = Stopwatch::start();
    let mut report = Report::new("exponents", config);
    let p = prepare(config, &mut report.warnings)?;
    clock.lap("tune");
    let map = p.tuned.map;
    let (tower, depth) =
        with_precision_guard(config, p.depth, config.n_min, &mut report.warnings, |d| conjugacy_tower(&map, &p.target, d))?;
    clock.lap("partitions");

    let lebesgue = estimate_exponents_in(&tower, SamplingMeasure::Lebesgue, config.samples_lebesgue, config.n_min, config.seed, config.execution)?;
    // a separate stream family for the second measure
    let mu = estimate_exponents_in(&tower, SamplingMeasure::Mu, config.samples_mu, config.n_min, config.seed ^ MU_STREAM, config.execution)?;
    clock.lap("sampling");
    let gamma_lebesgue = gamma_exponents(&lebesgue)?;
    let gamma_mu = gamma_exponents(&mu)?;
    let hausdorff = hausdorff_estimate(&mu)?;
    let profile = profile_from_tower(&tower, config.profile_min_level);
    clock.lap("summaries");

    let mut samples = Table::new("exponent_samples", &["measure", "sample", "x", "level", "r"]);
    let mut levels = Table::new("exponent_levels", &["measure", "exponent", "level", "mean", "q05", "q25", "q50", "q75", "q95"]);
    for (est, kind) in [(&lebesgue, "tau"), (&mu, "tau"), (&gamma_lebesgue, "gamma"), (&gamma_mu, "gamma")] {
        let name = est.sampling_measure.name();
        if kind == "tau" {
            for (i, (x, seq)) in est.points.iter().zip(&est.sequences).enumerate() {
                for (j, r) in seq.iter().enumerate() {
                    samples.push(vec![name.into(), i.to_string(), fmt_f(*x), (est.n_min + j).to_string(), fmt_f(*r)]);
                }
            }
        }
        for q in &est.quantiles {
            levels.push(vec![
                name.into(),
                kind.into(),
                q.level.to_string(),
                fmt_f(q.mean),
                fmt_f(q.q05),
                fmt_f(q.q25),
                fmt_f(q.q50),
                fmt_f(q.q75),
                fmt_f(q.q95),
            ]);
        }
    }
    let mut prof = Table::new("singularity_profile", &["level", "cover_fraction", "atoms_used"]);
    for l in &profile.levels {
        prof.push(vec![l.level.to_string(), fmt_f(l.cover_fraction), l.atoms_used.to_string()]);
    }
    report.add_table(samples);
    report.add_table(levels);
    report.add_table(prof);

    report.summary = serde_json::to_value(ExponentsSummary {
        omega: map.omega,
        depth,
        lebesgue: MeasureSummary::of(&lebesgue),
        mu: MeasureSummary::of(&mu),
        gamma_lebesgue: MeasureSummary::of(&gamma_lebesgue),
        gamma_mu: MeasureSummary::of(&gamma_mu),
        hausdorff,
        profile_strictly_decreasing: profile.strictly_decreasing(),
        profile: profile.levels,
    })?;
    clock.lap("tables");
    report.timings = clock.finish();
    Ok(report)
}

/// Xored into the seed for the `mu` samples.
const MU_STREAM: u64 = 0x6d75_0000_0000_0000;
