use serde::{Deserialize, Serialize};

use scl_core::discrepancy::{discrepancy_survey, LevelMinimum};

use super::{prepare, with_precision_guard};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{fmt_f, Report, Stopwatch, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancySummary {
    pub omega: f64,
    pub r: usize,
    pub levels: (usize, usize),
    pub minima: Vec<LevelMinimum>,
    /// Smallest `delta` over all boxes and levels for step `r`.
    pub floor: f64,
    pub min_gibbs_gap: f64,
    /// Largest `delta` over every box, level and step.
    pub max_delta: f64,
    pub boxes: usize,
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let mut clock = Stopwatch::start();
    let mut report = Report::new("discrepancy", config);
    let p = prepare(config, &mut report.warnings)?;
    clock.lap("tune");
    let mut steps = config.refinement_steps.clone();
    steps.push(config.r);
    steps.sort_unstable();
    steps.dedup();
    let max_step = *steps.last().unwrap_or(&config.r);
    let (lo, hi) = config.discrepancy_levels;
    let top = hi.min(p.target.depth().saturating_sub(max_step));
    let (survey, top) = with_precision_guard(config, top, lo, &mut report.warnings, |top| {
        discrepancy_survey(&p.tuned.map, &p.target, lo..=top, &steps, config.execution)
    })?;
    if top < hi {
        report.warnings.push(format!("truncated at level {top}"));
    }
    clock.lap("survey");

    let mut boxes = Table::new("discrepancy_boxes", &["level", "box_index", "r", "label", "k", "delta", "entropy", "gibbs_gap", "atoms"]);
    for b in &survey.boxes {
        boxes.push(vec![
            b.level.to_string(),
            b.box_index.to_string(),
            b.r.to_string(),
            format!("{:?}", b.label).to_lowercase(),
            b.k.to_string(),
            fmt_f(b.delta),
            fmt_f(b.entropy),
            fmt_f(b.gibbs_gap),
            b.atoms.to_string(),
        ]);
    }
    let mut levels = Table::new("discrepancy_levels", &["level", "r", "min_delta", "min_gibbs_gap"]);
    for m in &survey.minima {
        levels.push(vec![m.level.to_string(), m.r.to_string(), fmt_f(m.min_delta), fmt_f(m.min_gibbs_gap)]);
    }
    report.add_table(boxes);
    report.add_table(levels);
    report.summary = serde_json::to_value(DiscrepancySummary {
        omega: p.tuned.map.omega,
        r: config.r,
        levels: (lo, top),
        floor: survey.min_deltas(config.r).into_iter().fold(f64::INFINITY, f64::min),
        min_gibbs_gap: survey.minima.iter().map(|m| m.min_gibbs_gap).fold(f64::INFINITY, f64::min),
        max_delta: survey.boxes.iter().map(|b| b.delta).fold(0.0, f64::max),
        minima: survey.minima,
        boxes: survey.boxes.len(),
    })?;
    report.timings = clock.finish();
    Ok(report)
}
