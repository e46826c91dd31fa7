//! The JSON envelope wrapping every report.

use crate::config::RunConfig;
use crate::run::CliError;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::Duration;

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub result: Value,
    pub duration_ms: u64,
}

impl ReportEnvelope {
    pub fn new(config: RunConfig, result: Value, elapsed: Duration) -> Self {
        ReportEnvelope {
            tool: "selfless",
            version: env!("CARGO_PKG_VERSION"),
            config,
            result,
            duration_ms: elapsed.as_millis() as u64,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("envelopes are plain data");
        text.push('\n');
        text
    }
}

/// Structured error object printed to stderr on failure.
pub fn error_json(error: &CliError) -> String {
    let value = json!({
        "error": {
            "kind": error.kind(),
            "message": error.to_string(),
        }
    });
    serde_json::to_string_pretty(&value).expect("plain data")
}
