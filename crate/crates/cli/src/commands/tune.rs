use serde::Serialize;

use scl_core::map::{estimate_rotation_cf, orbit_length_for};
use scl_core::partition::{dynamical_partition, u_neighborhood_radius};

use super::prepare;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{fmt_f, Report, Stopwatch, Table};

#[derive(Debug, Clone, Serialize)]
pub struct TuneSummary {
    pub omega: f64,
    pub omega_bracket: (f64, f64),
    pub matched_depth: usize,
    pub bisection_steps: usize,
    /// Closest-return times of the tuned map.
    pub q_table: Vec<u64>,
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let mut clock = Stopwatch::start();
    let mut report = Report::new("tune", config);
    let p = prepare(config, &mut report.warnings)?;
    clock.lap("tune");
    let map = &p.tuned.map;
    let depth = p.tuned.matched_depth;
    let cf = estimate_rotation_cf(map, depth, orbit_length_for(&p.target, depth))?;
    let mut q_map = vec![1u64, cf.a(1)];
    for &a in &cf.coefficients()[1..depth] {
        let (q1, q0) = (q_map[q_map.len() - 1], q_map[q_map.len() - 2]);
        q_map.push(a * q1 + q0);
    }

    let mut table = Table::new(
        "closest_returns",
        &["level", "a_target", "p_target", "q_target", "theta_target", "q_map", "return_distance_map"],
    );
    for (n, q) in q_map.iter().enumerate().skip(1) {
        table.push(vec![
            n.to_string(),
            p.target.cf().a(n).to_string(),
            p.target.p(n).to_string(),
            p.target.q(n).to_string(),
            fmt_f(p.target.theta(n)),
            q.to_string(),
            fmt_f(u_neighborhood_radius(map, &p.target, n)?),
        ]);
    }
    clock.lap("closest returns");
    report.add_table(table);
    let partition = dynamical_partition(map, &p.target, p.depth)?;
    report.add_document("partition", serde_json::to_value(&partition)?);
    clock.lap("partition");
    report.summary = serde_json::to_value(TuneSummary {
        omega: map.omega,
        omega_bracket: p.tuned.omega_bracket,
        matched_depth: depth,
        bisection_steps: p.tuned.bisection_steps,
        q_table: q_map,
    })?;
    report.timings = clock.finish();
    Ok(report)
}
