use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// What produced a report. Embedded in every report so a run can be repeated.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    /// Report path, or `-` for standard output.
    pub outputs: String,
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            outputs: "-".to_string(),
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn input(mut self, path: &str) -> Self {
        self.inputs.push(path.to_string());
        self
    }

    pub fn param(mut self, name: &str, value: impl Serialize) -> Self {
        self.parameters.insert(
            name.to_string(),
            serde_json::to_value(value).expect("parameters are serializable"),
        );
        self
    }
}
