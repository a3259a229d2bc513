//! Machine-readable experiment reports.

use serde::Serialize;
use serde_json::{Map, Value};

/// One comparison: `measured` against `reference` with tolerance `tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub reference: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// `|measured − reference| ≤ tol·|reference|`, or `|measured| ≤ tol` when the
    /// reference is zero.
    pub fn relative(name: impl Into<String>, measured: f64, reference: f64, tol: f64) -> Self {
        let err = (measured - reference).abs();
        let pass = if reference == 0.0 { err <= tol } else { err <= tol * reference.abs() };
        CheckRecord { name: name.into(), measured, reference, tol, pass: pass && measured.is_finite() }
    }

    /// `|measured − reference| ≤ tol`.
    pub fn absolute(name: impl Into<String>, measured: f64, reference: f64, tol: f64) -> Self {
        let pass = (measured - reference).abs() <= tol;
        CheckRecord { name: name.into(), measured, reference, tol, pass: pass && measured.is_finite() }
    }

    /// `measured ≤ limit`; the limit is stored as the reference with zero tolerance.
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        CheckRecord { name: name.into(), measured, reference: limit, tol: 0.0, pass: measured <= limit }
    }

    /// `measured ≥ limit`.
    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        CheckRecord { name: name.into(), measured, reference: limit, tol: 0.0, pass: measured >= limit }
    }

    /// A boolean fact compared with its expected value (1 = true).
    pub fn flag(name: impl Into<String>, measured: bool, expected: bool) -> Self {
        CheckRecord {
            name: name.into(),
            measured: measured as u8 as f64,
            reference: expected as u8 as f64,
            tol: 0.0,
            pass: measured == expected,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisViolated,
}

/// Outcome of one experiment. `status` is `pass` iff every record passes, unless the
/// experiment found its hypotheses violated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config_digest: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub provenance: Map<String, Value>,
    pub wall_ms: u64,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            config_digest: String::new(),
            status: Status::Pass,
            checks: Vec::new(),
            provenance: Map::new(),
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
        self.refresh();
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.provenance.insert(key.to_string(), value);
    }

    pub fn mark_hypothesis_violated(&mut self) {
        self.status = Status::HypothesisViolated;
    }

    fn refresh(&mut self) {
        if self.status != Status::HypothesisViolated {
            self.status = if self.checks.iter().all(|c| c.pass) { Status::Pass } else { Status::Fail };
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// The report as JSON with `wall_ms` removed, for byte comparisons across runs.
    pub fn without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Value::Object(m) = &mut v {
            m.remove("wall_ms");
        }
        v
    }
}
