//! Machine-readable outcome of a certification check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Decided by an eigenvalue or singular-value computation.
    Exact,
    /// Decided by seeded sampling; a pass is evidence, not proof.
    Sampled,
}

/// One certified (or refuted) condition.
///
/// `pass` is always `margin >= -tolerance`. When `hypothesis_met` is
/// false, the check ran but the statement it tests was not expected to
/// hold for this input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub pass: bool,
    pub margin: f64,
    #[serde(default)]
    pub tolerance: f64,
    pub mode: CheckMode,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default = "yes")]
    pub hypothesis_met: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn yes() -> bool {
    true
}

impl ConditionReport {
    pub fn exact(condition: impl Into<String>, margin: f64, tolerance: f64) -> Self {
        ConditionReport {
            condition: condition.into(),
            pass: margin >= -tolerance,
            margin,
            tolerance,
            mode: CheckMode::Exact,
            samples: None,
            seed: None,
            hypothesis_met: true,
            parameters: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn sampled(condition: impl Into<String>, margin: f64, tolerance: f64, samples: usize, seed: u64) -> Self {
        ConditionReport {
            mode: CheckMode::Sampled,
            samples: Some(samples),
            seed: Some(seed),
            ..Self::exact(condition, margin, tolerance)
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_hypothesis(mut self, met: bool) -> Self {
        self.hypothesis_met = met;
        self
    }

    /// `pass` agrees with the sign of `margin + tolerance`.
    pub fn is_consistent(&self) -> bool {
        self.pass == (self.margin >= -self.tolerance)
    }
}
