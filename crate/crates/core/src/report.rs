//! Verdict records shared by the inequality and interpolation checks, with
//! JSON and CSV writers.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Equality,
    Fail,
    /// A demonstration run whose outcome is informational.
    Demonstrated,
}

impl Verdict {
    /// `fail` only when `value > bound + est_error`; `equality` when
    /// `|bound − value| ≤ max(est_error, 1e−9·|bound|)`.
    pub fn classify(value: f64, bound: f64, est_error: f64) -> Verdict {
        if value.is_nan() || bound.is_nan() {
            return Verdict::Fail;
        }
        let slack = bound - value;
        if slack.is_nan() {
            return Verdict::Equality;
        }
        if slack.abs() <= est_error.max(1e-9 * bound.abs()) {
            Verdict::Equality
        } else if value > bound + est_error {
            Verdict::Fail
        } else {
            Verdict::Pass
        }
    }

    pub fn ok(self) -> bool {
        self != Verdict::Fail
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Equality => "equality",
            Verdict::Fail => "fail",
            Verdict::Demonstrated => "demonstrated",
        }
    }
}

/// One checked inequality `value ≤ bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub check: String,
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub est_error: f64,
    /// Description of the discretization behind `value`.
    pub grid: String,
    pub verdict: Verdict,
}

impl QuadratureReport {
    pub fn new(
        check: &str,
        params: &[(&str, f64)],
        value: f64,
        bound: f64,
        est_error: f64,
        grid: impl Into<String>,
    ) -> Self {
        QuadratureReport {
            check: check.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            bound,
            slack: bound - value,
            est_error,
            grid: grid.into(),
            verdict: Verdict::classify(value, bound, est_error),
        }
    }

    /// Relative distance `|value − bound|/|bound|`.
    pub fn relative_gap(&self) -> f64 {
        (self.value - self.bound).abs() / self.bound.abs()
    }

    pub fn with_verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }
}

pub fn write_json<W: Write>(reports: &[QuadratureReport], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, reports)?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    params: String,
    value: f64,
    bound: f64,
    slack: f64,
    est_error: f64,
    grid: &'a str,
    verdict: &'static str,
}

/// One row per report; parameters are flattened to `key=value;…`.
pub fn write_csv<W: Write>(reports: &[QuadratureReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in reports {
        out.serialize(CsvRow {
            check: &r.check,
            params: r
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";"),
            value: r.value,
            bound: r.bound,
            slack: r.slack,
            est_error: r.est_error,
            grid: &r.grid,
            verdict: r.verdict.as_str(),
        })?;
    }
    out.flush()?;
    Ok(())
}
