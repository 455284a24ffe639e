//! Verification report: one record per executed check plus provenance.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Passes when `measured <= tolerance`.
    AtMost,
    /// Passes when `measured >= tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// A check whose premise the configuration deliberately violates.
    ExpectedFail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub group: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn holds(&self) -> bool {
        let ok = match self.bound {
            Bound::AtMost => self.measured <= self.tolerance,
            Bound::AtLeast => self.measured >= self.tolerance,
        };
        ok && self.measured.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Accumulates checks for one group, honouring an optional group filter.
pub struct Recorder {
    checks: Vec<Check>,
    /// Premise-violating groups whose failures are expected.
    expected_fail: Vec<String>,
}

impl Recorder {
    pub fn new(expected_fail: Vec<String>) -> Self {
        Self {
            checks: Vec::new(),
            expected_fail,
        }
    }

    pub fn record(&mut self, group: &str, name: impl Into<String>, measured: f64, tolerance: f64, bound: Bound) {
        self.push(group, name.into(), measured, tolerance, bound, None);
    }

    pub fn record_note(
        &mut self,
        group: &str,
        name: impl Into<String>,
        measured: f64,
        tolerance: f64,
        bound: Bound,
        note: impl Into<String>,
    ) {
        self.push(group, name.into(), measured, tolerance, bound, Some(note.into()));
    }

    /// Records a check that could not be evaluated.
    pub fn error(&mut self, group: &str, name: impl Into<String>, err: impl ToString) {
        self.push(group, name.into(), f64::NAN, 0.0, Bound::AtMost, Some(err.to_string()));
    }

    fn push(&mut self, group: &str, name: String, measured: f64, tolerance: f64, bound: Bound, note: Option<String>) {
        let mut check = Check {
            name,
            group: group.into(),
            measured,
            tolerance,
            bound,
            status: Status::Pass,
            note,
        };
        if !check.holds() {
            check.status = if self.expected_fail.iter().any(|g| g == group) {
                Status::ExpectedFail
            } else {
                Status::Fail
            };
        }
        self.checks.push(check);
    }

    pub fn finish(self, provenance: Provenance) -> RunReport {
        let passed = self.checks.iter().all(|c| c.status != Status::Fail);
        RunReport {
            provenance,
            checks: self.checks,
            passed,
        }
    }
}
