//! Report types. Field order is the serialized order and is part of the
//! report format.

use serde::{Deserialize, Serialize};

/// One estimate at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: u64,
    pub quantity: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub target: Option<f64>,
    /// Set for per-scenery rows of the concentration experiment.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scenery_seed: Option<u64>,
}

impl Row {
    pub fn new(n: u64, quantity: impl Into<String>, estimate: f64) -> Self {
        Row {
            n,
            quantity: quantity.into(),
            estimate,
            stderr: None,
            target: None,
            scenery_seed: None,
        }
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_scenery_seed(mut self, seed: u64) -> Self {
        self.scenery_seed = Some(seed);
        self
    }
}

/// A hypothesis test outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub name: String,
    pub n: u64,
    pub samples: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub rejected: bool,
}

/// A pass/fail verdict together with the rule and tolerance it used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub rule: String,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, rule: impl Into<String>, observed: f64, tolerance: f64, passed: bool) -> Self {
        Check {
            name: name.into(),
            rule: rule.into(),
            observed,
            tolerance,
            passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub experiment: String,
    pub seed: u64,
    pub walk: String,
    pub scenery: String,
    pub parameters: serde_json::Value,
    pub rows: Vec<Row>,
    pub tests: Vec<TestRecord>,
    pub checks: Vec<Check>,
    /// Labeled diagnostics; never part of a verdict.
    pub diagnostics: Vec<Row>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl StatReport {
    pub fn new(experiment: &str, seed: u64, walk: String, scenery: String, parameters: serde_json::Value) -> Self {
        StatReport {
            experiment: experiment.to_string(),
            seed,
            walk,
            scenery,
            parameters,
            rows: Vec::new(),
            tests: Vec::new(),
            checks: Vec::new(),
            diagnostics: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn rows_for<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
