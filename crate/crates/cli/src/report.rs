//! Aggregated run results.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use qpsido_core::ZetaReport;

use crate::config::{RunConfig, Suite};

pub const SCHEMA: &str = "twisted-psido-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Expected anomaly worth reporting; never counts as a failure.
    Flagged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flagged => "flagged",
        }
    }
}

/// How a check's value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Symbolic computation; the value is a count of mismatches.
    Exact,
    Numeric,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Exact => "exact",
            Kind::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    /// Informational value, no threshold.
    #[serde(rename = "info")]
    Info,
}

impl Comparison {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Info => "info",
        }
    }
}

/// Non-finite values are written as strings so JSON stays valid.
fn finite_or_text<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&format_value(*v))
    }
}

pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub status: Status,
    #[serde(serialize_with = "finite_or_text")]
    pub value: f64,
    #[serde(serialize_with = "finite_or_text")]
    pub threshold: f64,
    pub comparison: Comparison,
    pub kind: Kind,
    pub note: String,
}

impl Check {
    /// `value ≤ threshold`; NaN fails.
    pub fn at_most(suite: Suite, name: impl Into<String>, kind: Kind, value: f64, threshold: f64) -> Self {
        let status = if value <= threshold { Status::Pass } else { Status::Fail };
        Check {
            suite,
            name: name.into(),
            status,
            value,
            threshold,
            comparison: Comparison::AtMost,
            kind,
            note: String::new(),
        }
    }

    pub fn at_least(suite: Suite, name: impl Into<String>, kind: Kind, value: f64, threshold: f64) -> Self {
        let status = if value >= threshold { Status::Pass } else { Status::Fail };
        Check { comparison: Comparison::AtLeast, status, ..Check::at_most(suite, name, kind, value, threshold) }
    }

    /// Exact check: `mismatches` must be zero.
    pub fn exact(suite: Suite, name: impl Into<String>, mismatches: usize) -> Self {
        Check::at_most(suite, name, Kind::Exact, mismatches as f64, 0.0)
    }

    pub fn info(suite: Suite, name: impl Into<String>, kind: Kind, value: f64) -> Self {
        Check { comparison: Comparison::Info, threshold: f64::NAN, ..Check::at_most(suite, name, kind, value, 0.0) }
            .with_status(Status::Pass)
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SpectrumRow {
    #[serde(skip)]
    pub key: (i32, i32, i32),
    pub l: String,
    pub m: String,
    pub w: String,
    pub eigenvalue: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub spectrum: Vec<SpectrumRow>,
    pub zeta: Option<ZetaReport>,
    /// Seconds per suite; only present when requested since it breaks
    /// byte-for-byte reproducibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl SuiteReport {
    pub fn new(config: RunConfig) -> Self {
        SuiteReport { schema: SCHEMA, config, checks: Vec::new(), spectrum: Vec::new(), zeta: None, timings: None }
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failed(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let bound = match c.comparison {
                Comparison::Info => String::new(),
                cmp => format!(" ({} {})", cmp.as_str(), format_value(c.threshold)),
            };
            out.push_str(&format!(
                "[{:<7}] {:<10} {}: {}{}{}\n",
                c.status.as_str(),
                c.suite.name(),
                c.name,
                format_value(c.value),
                bound,
                if c.note.is_empty() { String::new() } else { format!(" — {}", c.note) }
            ));
        }
        out.push_str(&format!(
            "{} pass, {} fail, {} flagged\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Flagged)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons_and_nan() {
        assert_eq!(Check::at_most(Suite::Zeta, "x", Kind::Numeric, 1.0, 2.0).status, Status::Pass);
        assert_eq!(Check::at_most(Suite::Zeta, "x", Kind::Numeric, f64::NAN, 2.0).status, Status::Fail);
        assert_eq!(Check::at_least(Suite::Zeta, "x", Kind::Numeric, 1.0, 2.0).status, Status::Fail);
        assert_eq!(Check::exact(Suite::Hopf, "x", 0).status, Status::Pass);
        let j = serde_json::to_string(&Check::at_most(Suite::Zeta, "x", Kind::Numeric, f64::NEG_INFINITY, 1.0)).unwrap();
        assert!(j.contains("\"value\":\"-inf\""), "{j}");
        assert!(j.contains("\"comparison\":\"<=\""), "{j}");
    }
}
