//! Suite reports: a CSV body with a fixed per-suite schema and a JSON summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// One checked condition. Hard assertions count towards `failures`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Assertion {
    /// Passes when `value ≤ limit` (and `value` is not NaN).
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Assertion {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: String,
    pub config_hash: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub max_ratio: f64,
    pub assertions: Vec<Assertion>,
    /// Recorded constants and statistics.
    pub recorded: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    suite: &'a str,
    config_hash: &'a str,
    max_ratio: Option<f64>,
    failures: usize,
    assertions: &'a [Assertion],
    recorded: BTreeMap<&'a str, Option<f64>>,
    rows: usize,
}

/// Finite floats pass through; NaN and infinities become `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

impl Report {
    pub fn new(config: &ExperimentConfig, columns: Vec<&'static str>) -> Self {
        Report {
            suite: config.suite.name().to_string(),
            config_hash: config.hash(),
            columns,
            rows: Vec::new(),
            max_ratio: 0.0,
            assertions: Vec::new(),
            recorded: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row does not match the schema"
        );
        self.rows.push(row);
    }

    /// Folds a trial ratio into `max_ratio`.
    pub fn observe(&mut self, ratio: f64) {
        if ratio > self.max_ratio || ratio.is_nan() {
            self.max_ratio = ratio;
        }
    }

    pub fn record(&mut self, key: impl Into<String>, value: f64) {
        self.recorded.insert(key.into(), value);
    }

    pub fn assert(&mut self, assertion: Assertion) {
        self.assertions.push(assertion);
    }

    pub fn failures(&self) -> usize {
        self.assertions.iter().filter(|a| !a.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn summary_json(&self) -> Result<String> {
        let summary = Summary {
            suite: &self.suite,
            config_hash: &self.config_hash,
            max_ratio: finite(self.max_ratio),
            failures: self.failures(),
            assertions: &self.assertions,
            recorded: self
                .recorded
                .iter()
                .map(|(k, v)| (k.as_str(), finite(*v)))
                .collect(),
            rows: self.rows.len(),
        };
        Ok(serde_json::to_string_pretty(&summary)?)
    }

    /// Writes the CSV to `out` and the summary next to it; returns the
    /// summary path.
    pub fn write(&self, out: &Path) -> Result<PathBuf> {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(out, self.csv()?).with_context(|| format!("writing {}", out.display()))?;
        let summary = summary_path(out);
        std::fs::write(&summary, self.summary_json()? + "\n")
            .with_context(|| format!("writing {}", summary.display()))?;
        Ok(summary)
    }
}

/// `dir/name.csv` → `dir/name.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.json"))
}

/// Relative change `|b − a| / |a|`; zero when both vanish.
pub fn drift(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    #[test]
    fn csv_and_summary() {
        let config = ExperimentConfig::default_for(Suite::Counting);
        let mut r = Report::new(&config, vec!["a", "b"]);
        r.push_row(vec!["1".into(), "x,y".into()]);
        r.observe(0.5);
        r.observe(f64::INFINITY);
        r.assert(Assertion::at_most("ok", 1.0, 2.0));
        r.assert(Assertion::at_most("nan", f64::NAN, 2.0));
        assert_eq!(r.csv().unwrap(), "a,b\n1,\"x,y\"\n");
        let s: serde_json::Value = serde_json::from_str(&r.summary_json().unwrap()).unwrap();
        assert_eq!(s["failures"], 1);
        assert!(s["max_ratio"].is_null());
        assert_eq!(s["suite"], "counting");
        assert_eq!(
            summary_path(Path::new("out/r.csv")),
            PathBuf::from("out/r.summary.json")
        );
        assert_eq!(drift(0.0, 0.0), 0.0);
        assert!((drift(2.0, 2.5) - 0.25).abs() < 1e-15);
    }
}
