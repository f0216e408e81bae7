//! Pass/fail check reports shared by the analysis modules and the CLI.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub witnesses: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport { check: check.into(), pass: true, witnesses: Vec::new(), note: None }
    }

    /// Records a counterexample and marks the check failed.
    pub fn fail(&mut self, witness: Value) {
        self.pass = false;
        if self.witnesses.len() < 16 {
            self.witnesses.push(witness);
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }
}
