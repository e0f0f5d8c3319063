//! Checks, tables and the summary file.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One measured quantity with its bound. `asserted` checks decide the exit code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub asserted: bool,
    pub pass: bool,
}

impl Check {
    /// value <= bound.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, asserted: bool) -> Check {
        Check { name: name.into(), value, bound, asserted, pass: value <= bound }
    }

    /// value > bound.
    pub fn above(name: impl Into<String>, value: f64, bound: f64, asserted: bool) -> Check {
        Check { name: name.into(), value, bound, asserted, pass: value > bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub task: String,
    pub mode: String,
    pub seed: u64,
    pub passed: bool,
    pub notes: Vec<String>,
    pub files: Vec<String>,
    pub check: Vec<Check>,
}

impl Summary {
    pub fn new(task: &str, mode: &str, seed: u64) -> Summary {
        Summary { task: task.into(), mode: mode.into(), seed, passed: true, notes: vec![], files: vec![], check: vec![] }
    }

    pub fn push(&mut self, c: Check) {
        self.check.push(c);
    }

    pub fn finish(&mut self) {
        self.passed = self.check.iter().all(|c| !c.asserted || c.pass);
    }

    pub fn failed_asserted(&self) -> Vec<&Check> {
        self.check.iter().filter(|c| c.asserted && !c.pass).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.check.iter().find(|c| c.name == name)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("summary serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }
}

/// A table written as CSV and as a whitespace-separated file for plotting.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Same columns, '#'-prefixed header, for gnuplot.
    pub fn write_columns(&self, path: &Path) -> Result<()> {
        let mut s = format!("# {}\n", self.header.join(" "));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| if c.is_empty() { "nan".into() } else { c.replace(' ', "_") }).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        std::fs::write(path, s)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
