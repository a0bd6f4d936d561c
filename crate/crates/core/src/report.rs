//! Experiment reports: per-trial records in fixed columns, summaries,
//! contract checks, and JSON / CSV output.

use crate::error::Result;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub count: usize,
}

impl Summary {
    /// Summary of the finite entries; `None` when there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Summary> {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Some(Summary {
            min: v[0],
            median,
            max: v[n - 1],
            count: n,
        })
    }
}

/// A named condition evaluated over the whole run. Contract checks are
/// identities and invariants; the others are empirical bounds on recorded
/// constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub contract: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub columns: Vec<String>,
    pub records: Vec<Vec<f64>>,
    pub summary: BTreeMap<String, Summary>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: serde_json::Value, columns: &[&str]) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            records: Vec::new(),
            summary: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, record: Vec<f64>) {
        assert_eq!(record.len(), self.columns.len(), "record width must match columns");
        self.records.push(record);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, in record order.
    pub fn column(&self, name: &str) -> Vec<f64> {
        match self.column_index(name) {
            Some(k) => self.records.iter().map(|r| r[k]).collect(),
            None => Vec::new(),
        }
    }

    /// Values of `name` on the records whose `depth` column equals `depth`.
    pub fn column_at_depth(&self, name: &str, depth: u32) -> Vec<f64> {
        let (Some(k), Some(d)) = (self.column_index(name), self.column_index("depth")) else {
            return Vec::new();
        };
        self.records
            .iter()
            .filter(|r| r[d] == depth as f64)
            .map(|r| r[k])
            .collect()
    }

    pub fn summarize(&mut self, name: &str) {
        if let Some(s) = Summary::of(self.column(name)) {
            self.summary.insert(name.to_string(), s);
        }
    }

    pub fn summarize_scalar(&mut self, name: &str, value: f64) {
        if let Some(s) = Summary::of([value]) {
            self.summary.insert(name.to_string(), s);
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            contract: true,
            passed,
            detail: detail.into(),
        });
    }

    pub fn empirical(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            contract: false,
            passed,
            detail: detail.into(),
        });
    }

    pub fn contracts_hold(&self) -> bool {
        self.checks.iter().filter(|c| c.contract).all(|c| c.passed)
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Header comment lines (`# ...`) followed by one row per record.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# experiment: {}", self.experiment)?;
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?)?;
        writeln!(out, "# columns: {}", self.columns.join(","))?;
        for c in &self.checks {
            let kind = if c.contract { "contract" } else { "empirical" };
            writeln!(out, "# {kind} {}: {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail)?;
        }
        for n in &self.notes {
            writeln!(out, "# note: {n}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for r in &self.records {
            writer.write_record(r.iter().map(|v| if v.is_nan() { String::new() } else { format!("{v:?}") }))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

struct Records<'a>(&'a [String], &'a [Vec<f64>]);
struct Row<'a>(&'a [String], &'a [f64]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Records<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.1.len()))?;
        for r in self.1 {
            seq.serialize_element(&Row(self.0, r))?;
        }
        seq.end()
    }
}

impl Serialize for ExperimentReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(7))?;
        map.serialize_entry("experiment", &self.experiment)?;
        map.serialize_entry("config", &self.config)?;
        map.serialize_entry("columns", &self.columns)?;
        map.serialize_entry("summary", &self.summary)?;
        map.serialize_entry("checks", &self.checks)?;
        map.serialize_entry("notes", &self.notes)?;
        map.serialize_entry("records", &Records(&self.columns, &self.records))?;
        map.end()
    }
}
