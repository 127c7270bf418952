use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Assertion {
            name: name.into(),
            passed,
        }
    }
}

/// Machine-readable record of one run. Everything except `timing_ms` is a function of the
/// inputs, so two runs on the same inputs serialize to the same bytes.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub conventions: BTreeMap<&'static str, &'static str>,
    pub outputs: Value,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

/// A report plus its plain-text rendering and any JSON lines that precede it.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub text: Vec<String>,
    pub json_lines: Vec<String>,
}

/// sha256 over the inputs, each as a `name=value` line.
pub fn digest(inputs: &[(&str, &str)]) -> String {
    let mut h = Sha256::new();
    for (k, v) in inputs {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}
