//! Versioned experiment reports with JSON and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub queries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

/// Named statistics and pass flags of one experiment run.
///
/// Every flag in `checks` is computed from values stored in `statistics`,
/// so a report can be re-audited from its own contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub report_version: u32,
    pub name: String,
    pub parameters: Parameters,
    pub statistics: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<BTreeMap<String, f64>>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, parameters: Parameters) -> Self {
        Self {
            report_version: REPORT_VERSION,
            name: name.into(),
            parameters,
            statistics: BTreeMap::new(),
            checks: BTreeMap::new(),
            records: Vec::new(),
        }
    }

    pub fn stat(&mut self, key: &str, value: f64) -> &mut Self {
        self.statistics.insert(key.to_string(), value);
        self
    }

    pub fn check(&mut self, key: &str, pass: bool) -> &mut Self {
        self.checks.insert(key.to_string(), pass);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.statistics.get(key).copied()
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|&p| p)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, &p)| !p)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// `section,key,value` rows: statistics first, then checks as 0/1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,key,value\n");
        for (k, v) in &self.statistics {
            let _ = writeln!(out, "statistic,{k},{v}");
        }
        for (k, v) in &self.checks {
            let _ = writeln!(out, "check,{k},{}", u8::from(*v));
        }
        out
    }

    /// Per-trial records as a table whose columns are the union of record keys.
    pub fn records_csv(&self) -> String {
        let mut columns: Vec<&str> = self.records.iter().flat_map(|r| r.keys().map(String::as_str)).collect();
        columns.sort_unstable();
        columns.dedup();
        let mut out = columns.join(",");
        out.push('\n');
        for r in &self.records {
            let row: Vec<String> = columns
                .iter()
                .map(|c| r.get(*c).map(|v| v.to_string()).unwrap_or_default())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Standard error of an empirical proportion.
pub fn proportion_sem(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}
