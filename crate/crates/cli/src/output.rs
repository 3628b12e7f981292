use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use qql_core::ExperimentReport;
use serde::Serialize;
use serde_json::{json, Value};

use crate::Command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Result of one subcommand, ready to be rendered.
pub struct Rendered {
    body: Body,
    pub passed: bool,
    pub failed: Vec<String>,
}

enum Body {
    Report(ExperimentReport),
    /// Already formatted (oracle tables, Grover CSV).
    Raw(String),
}

impl Rendered {
    pub fn report(r: ExperimentReport) -> Self {
        Self {
            passed: r.passed(),
            failed: r.failed_checks().into_iter().map(String::from).collect(),
            body: Body::Report(r),
        }
    }

    pub fn raw(text: String, passed: bool) -> Self {
        Self {
            body: Body::Raw(text),
            passed,
            failed: Vec::new(),
        }
    }

    pub fn text(&self, command: &Command, format: Format) -> anyhow::Result<String> {
        let report = match &self.body {
            Body::Raw(text) => return Ok(text.clone()),
            Body::Report(r) => r,
        };
        let config = config(command)?;
        Ok(match format {
            Format::Json => {
                let doc = json!({
                    "config": config,
                    // Wall clock; the only field that differs between identical runs.
                    "generated_at": unix_seconds(),
                    "report": report,
                });
                serde_json::to_string_pretty(&doc)? + "\n"
            }
            Format::Csv => {
                let mut out = String::from("section,key,value\n");
                if let Value::Object(map) = &config {
                    for (k, v) in map {
                        let v = match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        out.push_str(&format!("config,{k},{v}\n"));
                    }
                }
                out.extend(report.to_csv().lines().skip(1).map(|l| format!("{l}\n")));
                out
            }
        })
    }
}

/// Flags of the subcommand as a flat object, with nested actions merged in.
fn config(command: &Command) -> anyhow::Result<Value> {
    let mut value = serde_json::to_value(command)?;
    let out = command.output();
    if let Value::Object(map) = &mut value {
        for nested in ["action"] {
            if let Some(Value::Object(inner)) = map.remove(nested) {
                map.extend(inner);
            }
        }
        map.insert("format".into(), serde_json::to_value(out.format)?);
        if let Some(path) = &out.output {
            map.insert("output".into(), Value::String(path.display().to_string()));
        }
    }
    Ok(value)
}

fn unix_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
