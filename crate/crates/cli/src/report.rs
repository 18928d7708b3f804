//! Run reports. The deterministic part and the timing are separate top-level
//! objects so reports can be compared byte for byte with `timing` removed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub tags: Vec<String>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    pub kind: String,
    pub tags: Vec<String>,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub artifacts: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub tol_scale: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub schema_version: u32,
    pub kind: String,
    pub environment: Environment,
    pub passed: bool,
    pub experiments: Vec<ExperimentResult>,
    /// Wall-clock seconds per experiment and in total.
    pub timing: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.experiments.iter().flat_map(|e| &e.checks).find(|c| c.name == name)
    }

    pub fn experiment(&self, name: &str) -> Option<&ExperimentResult> {
        self.experiments.iter().find(|e| e.name == name)
    }

    /// JSON without the `timing` object.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        v.as_object_mut().expect("object").remove("timing");
        serde_json::to_string_pretty(&v).expect("report serialises")
    }
}
