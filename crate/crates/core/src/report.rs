//! Audit reports shared by every check in the crate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Empirical verdict on one inequality, with the parameters that produced it.
///
/// Maps are ordered so that the JSON form is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub statistics: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    /// Report-specific top-level fields (e.g. `premises_hit`).
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl AuditReport {
    pub fn new(name: impl Into<String>) -> Self {
        AuditReport {
            name: name.into(),
            params: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            statistics: BTreeMap::new(),
            seed: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(value));
        self
    }

    pub fn stat(mut self, key: &str, value: impl Serialize) -> Self {
        self.statistics.insert(key.to_string(), to_value(value));
        self
    }

    pub fn field(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.to_string(), to_value(value));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }

    /// A statistic as `f64`, if present and numeric.
    pub fn stat_f64(&self, key: &str) -> Option<f64> {
        self.statistics.get(key).and_then(Value::as_f64)
    }

    /// A statistic as `u64`, if present and integral.
    pub fn stat_u64(&self, key: &str) -> Option<u64> {
        self.statistics
            .get(key)
            .or_else(|| self.extra.get(key))
            .and_then(Value::as_u64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
