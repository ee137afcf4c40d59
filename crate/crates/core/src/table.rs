//! Two-column numeric tables `(t, value)` with `t ≥ 0`, read as even functions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Behaviour beyond the last abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Beyond {
    Zero,
    Hold,
}

/// Piecewise-linear even function sampled at `0 ≤ t_0 < t_1 < ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    ts: Vec<f64>,
    values: Vec<f64>,
    beyond: Beyond,
}

impl Table {
    pub fn new(ts: Vec<f64>, values: Vec<f64>, beyond: Beyond) -> Result<Self> {
        if ts.len() != values.len() {
            return Err(Error::MalformedTable("column lengths differ".into()));
        }
        if ts.len() < 2 {
            return Err(Error::MalformedTable("need at least two rows".into()));
        }
        if ts[0] < 0.0 {
            return Err(Error::MalformedTable("abscissae must be nonnegative".into()));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::MalformedTable("abscissae must be strictly increasing".into()));
        }
        if ts.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::MalformedTable("non-finite entry".into()));
        }
        Ok(Self { ts, values, beyond })
    }

    /// Parses whitespace- or comma-separated rows; `#` starts a comment.
    pub fn parse(text: &str, beyond: Beyond) -> Result<Self> {
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::MalformedTable(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::MalformedTable(format!("line {}: {e}", lineno + 1)))
            };
            ts.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        Self::new(ts, values, beyond)
    }

    pub fn load(path: impl AsRef<Path>, beyond: Beyond) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text, beyond)
    }

    pub fn last_abscissa(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation at `|t|`.
    pub fn eval(&self, t: f64) -> f64 {
        let x = t.abs();
        if x <= self.ts[0] {
            return self.values[0];
        }
        let last = self.ts.len() - 1;
        if x >= self.ts[last] {
            return match self.beyond {
                Beyond::Hold => self.values[last],
                Beyond::Zero if x == self.ts[last] => self.values[last],
                Beyond::Zero => 0.0,
            };
        }
        let i = self.ts.partition_point(|&s| s <= x) - 1;
        let (x0, x1) = (self.ts[i], self.ts[i + 1]);
        let w = (x - x0) / (x1 - x0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}
