//! Report assembly: `report.json`, one CSV per table, and `timings.json`.
//!
//! Timings live in their own file so that the report and the tables are
//! byte-identical across runs with the same configuration.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// 17 significant digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Software {
    pub name: &'static str,
    pub version: &'static str,
}

pub const SOFTWARE: Software = Software { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub software: Software,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    /// Checks that did not hold; a nonempty list means exit status 1.
    pub failures: Vec<String>,
    pub tables: Vec<String>,
    /// Extra JSON files, such as serialized partitions.
    pub documents: Vec<String>,
    pub summary: serde_json::Value,
    #[serde(skip)]
    pub table_data: Vec<Table>,
    #[serde(skip)]
    pub document_data: Vec<serde_json::Value>,
    #[serde(skip)]
    pub timings: Timings,
}

impl Report {
    pub fn new(command: &'static str, config: &ExperimentConfig) -> Self {
        Self {
            command,
            software: SOFTWARE,
            config: config.clone(),
            warnings: Vec::new(),
            failures: Vec::new(),
            tables: Vec::new(),
            documents: Vec::new(),
            summary: serde_json::Value::Null,
            table_data: Vec::new(),
            document_data: Vec::new(),
            timings: Timings::default(),
        }
    }

    pub fn add_table(&mut self, t: Table) {
        self.tables.push(t.file_name());
        self.table_data.push(t);
    }

    /// Adds `{name}.json`.
    pub fn add_document(&mut self, name: &str, value: serde_json::Value) {
        self.documents.push(format!("{name}.json"));
        self.document_data.push(value);
    }

    /// Writes everything under `dir` and returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.table_data {
            let path = dir.join(t.file_name());
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&t.header)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            written.push(path);
        }
        for (name, doc) in self.documents.iter().zip(&self.document_data) {
            let path = dir.join(name);
            std::fs::write(&path, serde_json::to_string_pretty(doc)? + "\n")?;
            written.push(path);
        }
        let path = dir.join("report.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        written.push(path);
        let path = dir.join("timings.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.timings)? + "\n")?;
        written.push(path);
        Ok(written)
    }
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub phases: Vec<(String, f64)>,
    pub total: f64,
}

/// Records phases as they finish.
pub struct Stopwatch {
    start: Instant,
    last: Instant,
    timings: Timings,
}

impl Stopwatch {
    pub fn start() -> Self {
        let now = Instant::now();
        Self { start: now, last: now, timings: Timings::default() }
    }

    pub fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        self.timings.phases.push((phase.into(), (now - self.last).as_secs_f64()));
        self.last = now;
    }

    pub fn finish(mut self) -> Timings {
        self.timings.total = self.start.elapsed().as_secs_f64();
        self.timings
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f(-2.5), "-2.5000000000000000e0");
        assert_eq!(fmt_f(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn writes_tables_and_report() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new("tune", &ExperimentConfig::default());
        let mut t = Table::new("demo", &["level", "value"]);
        t.push(vec!["1".into(), fmt_f(0.5)]);
        r.add_table(t);
        let files = r.write(dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let csv = std::fs::read_to_string(dir.path().join("demo.csv")).unwrap();
        assert_eq!(csv, "level,value\n1,5.0000000000000000e-1\n");
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[1]).unwrap()).unwrap();
        assert_eq!(json["tables"][0], "demo.csv");
        assert_eq!(json["config"]["depth"], 14);
    }
}
