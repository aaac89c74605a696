//! Report records and CSV tables.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The inequality or identity being checked.
    pub statement: String,
    pub bound: Option<f64>,
    pub observed: Option<f64>,
    /// 95% interval around `observed`, when it is an estimate.
    pub ci: Option<[f64; 2]>,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, statement: impl Into<String>, bound: f64, observed: f64, pass: bool) -> Self {
        CheckRecord { name: name.into(), statement: statement.into(), bound: Some(bound), observed: Some(observed), ci: None, pass }
    }

    pub fn with_ci(mut self, lower: f64, upper: f64) -> Self {
        self.ci = Some([lower, upper]);
        self
    }

    pub fn flag(name: impl Into<String>, statement: impl Into<String>, pass: bool) -> Self {
        CheckRecord { name: name.into(), statement: statement.into(), bound: None, observed: None, ci: None, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    /// SHA-256 of the effective config serialized as compact JSON.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    pub checks: Vec<CheckRecord>,
    pub details: BTreeMap<String, Value>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn config_hash(config_json: &str) -> String {
    hex::encode(Sha256::digest(config_json.as_bytes()))
}

/// A CSV table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(format!("{}.csv", self.name));
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Cell text for an optional number; empty when absent.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
