//! Verification reports shared by the operator, representation and CLI
//! layers.

use serde::Serialize;

use crate::quadrature::Estimate;

/// One named value with its error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub name: String,
    pub value: f64,
    pub error: f64,
}

/// One evaluation point or configuration of a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub label: String,
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn new(label: impl Into<String>) -> Self {
        Row {
            label: label.into(),
            cells: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, est: Estimate) -> Self {
        self.cells.push(Cell {
            name: name.to_string(),
            value: est.value,
            error: est.error,
        });
        self
    }

    /// Adds a value computed in closed form (zero error).
    pub fn exact(self, name: &str, value: f64) -> Self {
        self.with(name, Estimate::exact(value))
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.name == name)
    }
}

/// Outcome of one check.
///
/// `statistic` is compared against `threshold`; informational reports
/// (comparability mode) carry no verdict and never fail an aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    pub informational: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// A report that passes iff `statistic ≤ threshold`.
    pub fn at_most(check: &str, statistic: f64, threshold: f64, rows: Vec<Row>) -> Self {
        VerificationReport {
            check: check.to_string(),
            passed: statistic <= threshold,
            informational: false,
            statistic,
            threshold,
            rows,
            notes: Vec::new(),
        }
    }

    pub fn informational(check: &str, statistic: f64, rows: Vec<Row>) -> Self {
        VerificationReport {
            check: check.to_string(),
            passed: true,
            informational: true,
            statistic,
            threshold: f64::NAN,
            rows,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn verdict(&self) -> &'static str {
        match (self.informational, self.passed) {
            (true, _) => "info",
            (false, true) => "pass",
            (false, false) => "FAIL",
        }
    }
}
