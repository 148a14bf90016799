use serde::{Deserialize, Serialize};

use scl_core::crossratio::{cubic_integrand_sweep, expansion_sweep, identity_sweep, quadrature_sweep, SweepSummary};
use scl_core::map::{CircleMap, CubicProxy, DEFAULT_U_RADIUS};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{fmt_f, Report, Stopwatch, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossratioSummary {
    pub sweeps: Vec<SweepSummary>,
    pub passed: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let mut clock = Stopwatch::start();
    let mut report = Report::new("crossratio-check", config);
    let (seed, exec, n) = (config.seed, config.execution, &config.sweeps);
    // gap images do not depend on omega
    let sine = CircleMap::critical_sine(0.0);
    let v = (DEFAULT_U_RADIUS, 1.0 - DEFAULT_U_RADIUS);
    let sweeps = vec![
        identity_sweep(n.identity, seed, exec),
        quadrature_sweep(n.quadrature, seed.wrapping_add(1), exec),
        expansion_sweep("dpoin_cubic", &CubicProxy, (0.0, 1.0), n.expansion, seed.wrapping_add(2), exec),
        expansion_sweep("dpoin_sine_v", &sine, v, n.expansion, seed.wrapping_add(3), exec),
        cubic_integrand_sweep(n.cubic_integrand, seed.wrapping_add(4), exec),
    ];
    clock.lap("sweeps");

    let mut table = Table::new("crossratio_checks", &["check", "count", "threshold", "worst", "offenders"]);
    let mut offenders = Table::new("crossratio_offenders", &["check", "sample"]);
    for s in &sweeps {
        table.push(vec![s.name.clone(), s.count.to_string(), fmt_f(s.threshold), fmt_f(s.worst), s.offenders.len().to_string()]);
        for i in &s.offenders {
            offenders.push(vec![s.name.clone(), i.to_string()]);
        }
        if !s.passed() {
            report.failures.push(format!("{}: worst {:e} over threshold {:e} at samples {:?}", s.name, s.worst, s.threshold, s.offenders));
        }
    }
    report.add_table(table);
    report.add_table(offenders);
    let passed = sweeps.iter().all(SweepSummary::passed);
    report.summary = serde_json::to_value(CrossratioSummary { sweeps, passed })?;
    report.timings = clock.finish();
    Ok(report)
}
