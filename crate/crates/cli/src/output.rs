//! Report envelope, exit status and writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "radnorm/1";

/// Outcome of a study, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Gated,
    NonFinite,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Gated => 1,
            Status::NonFinite => 2,
        }
    }
}

/// One CSV line: a grid point label with its value and error.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub point: String,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub body: Value,
    pub rows: Vec<Row>,
    pub status: Status,
    /// Lines for stderr, e.g. violated hypotheses.
    pub notes: Vec<String>,
}

impl Report {
    /// Builds a report; `gated` of `total` grid points failed their hypothesis.
    pub fn new(command: &str, body: Value, rows: Vec<Row>, gated: usize, total: usize, notes: Vec<String>) -> Self {
        let status = if rows.iter().any(|r| !r.value.is_finite()) {
            Status::NonFinite
        } else if total > 0 && gated == total {
            Status::Gated
        } else {
            Status::Ok
        };
        Self {
            command: command.to_string(),
            body,
            rows,
            status,
            notes,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status.code(),
            "report": self.body,
        })
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn write_report(report: &Report, json_path: Option<&Path>, csv_path: Option<&Path>) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(&report.to_json()).map_err(|e| e.to_string())?;
    text.push('\n');
    match json_path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string())?,
    }
    if let Some(p) = csv_path {
        let mut w = csv::Writer::from_path(p).map_err(|e| format!("{}: {e}", p.display()))?;
        for row in &report.rows {
            w.serialize(row).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok(())
}
