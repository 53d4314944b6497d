use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};

use super::scenario::ScenarioSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: ScenarioSpec,
    pub certificates: Vec<Certificate>,
    /// Derived quantities that are not pass/fail checks.
    pub observations: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub duration_ms: f64,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ReportError>,
}

impl Report {
    pub fn new(scenario: ScenarioSpec) -> Self {
        Report {
            scenario,
            certificates: Vec::new(),
            observations: BTreeMap::new(),
            verdict: Verdict::Pass,
            duration_ms: 0.0,
            version: VERSION.to_string(),
            error: None,
        }
    }

    pub fn push(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Certificate>) {
        self.certificates.extend(cs);
    }

    pub fn observe(&mut self, key: impl Into<String>, value: impl ToString) {
        self.observations.insert(key.into(), value.to_string());
    }

    pub fn set_error(&mut self, e: &Error) {
        self.error = Some(ReportError {
            code: e.code().to_string(),
            message: e.to_string(),
        });
    }

    /// Pass iff there is no error and every certificate passed.
    pub fn finish(&mut self, duration_ms: f64) {
        self.duration_ms = duration_ms;
        let ok = self.error.is_none() && self.certificates.iter().all(|c| c.passed);
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn certificate(&self, label: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.label == label)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "coxfock {}  kind={}  seed={}", self.version, self.scenario.kind, self.scenario.seed);
        if !self.certificates.is_empty() {
            let _ = writeln!(out, "{:<4} {:<56} {:>14} {:<2} {:<12}", "", "check", "value", "", "tolerance");
            for c in &self.certificates {
                let _ = writeln!(out, "{c}");
            }
        }
        if !self.observations.is_empty() {
            let width = self.observations.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, v) in &self.observations {
                let pad = width - k.chars().count();
                let _ = writeln!(out, "  {k}{} = {v}", " ".repeat(pad));
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error [{}]: {}", e.code, e.message);
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "verdict: {verdict}  ({:.1} ms)", self.duration_ms);
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::Structured => self.to_json().map(|mut s| {
                s.push('\n');
                s
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "structured" | "json" => Ok(Format::Structured),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}
