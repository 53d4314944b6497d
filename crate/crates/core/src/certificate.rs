//! Verdict records shared by every check in the crate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Which side of the tolerance a passing value lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Residual-style: pass iff `value <= tolerance`.
    AtMost,
    /// Eigenvalue-style: pass iff `value >= tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub label: String,
    /// Residual or minimal eigenvalue, depending on the check.
    pub value: f64,
    pub tolerance: f64,
    pub direction: Direction,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub context: BTreeMap<String, String>,
}

impl Certificate {
    pub fn new(label: impl Into<String>, value: f64, tolerance: f64, direction: Direction) -> Self {
        // NaN never passes.
        let passed = match direction {
            Direction::AtMost => value <= tolerance,
            Direction::AtLeast => value >= tolerance,
        };
        Certificate {
            label: label.into(),
            value,
            tolerance,
            direction,
            passed,
            context: BTreeMap::new(),
        }
    }

    pub fn at_most(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(label, value, tolerance, Direction::AtMost)
    }

    pub fn at_least(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(label, value, threshold, Direction::AtLeast)
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.context.insert(key.into(), value.to_string());
        self
    }

    /// A failed certificate carrying an error message instead of a number.
    pub fn failed(label: impl Into<String>, reason: impl ToString) -> Self {
        Certificate::at_most(label, f64::NAN, 0.0).with("error", reason)
    }

    /// Recomputes the verdict from the recorded numbers.
    pub fn is_consistent(&self) -> bool {
        let expected = match self.direction {
            Direction::AtMost => self.value <= self.tolerance,
            Direction::AtLeast => self.value >= self.tolerance,
        };
        expected == self.passed
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        write!(
            f,
            "{:<4} {:<56} {:>14.6e} {} {:<12.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.value,
            op,
            self.tolerance
        )
    }
}

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Validation tolerance factor; the effective tolerance is `validation * (1 + norm)`.
    pub validation: f64,
    /// PSD threshold; eigenvalues down to `-psd * max(1, norm)` still count as non-negative.
    pub psd: f64,
    /// Tolerance for algebraic identities (factorisations, Fock relations, moment agreement).
    pub residual: f64,
    /// Relative eigenvalue cutoff below which a Gram eigenvalue is treated as kernel.
    pub kernel_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            validation: 1e-9,
            psd: 1e-8,
            residual: 1e-10,
            kernel_cutoff: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validation_for(&self, norm: f64) -> f64 {
        self.validation * (1.0 + norm)
    }

    pub fn psd_threshold(&self, norm: f64) -> f64 {
        -self.psd * norm.max(1.0)
    }
}
