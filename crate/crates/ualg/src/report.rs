//! The machine-readable report emitted by the CLI: one JSON object per
//! invocation, on every code path including errors.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Verdict vocabulary shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Proved,
    Refuted,
    Unknown,
    Value,
}

impl Verdict {
    /// Exit code: 0 affirmative/value, 1 negative/refuted, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::True | Verdict::Proved | Verdict::Value => 0,
            Verdict::False | Verdict::Refuted => 1,
            Verdict::Unknown => 2,
        }
    }
}

/// One invocation's outcome. `certificate` is present whenever the
/// underlying operation promises one (witness assignments, separating
/// equations, countermodels, proofs, surjections).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds_used: Option<Value>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: Verdict) -> Self {
        Report {
            command: command.into(),
            verdict,
            certificate: None,
            bounds_used: None,
            elapsed_ms: 0,
            error: None,
        }
    }

    pub fn with_certificate(mut self, certificate: Value) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn with_bounds(mut self, bounds: Value) -> Self {
        self.bounds_used = Some(bounds);
        self
    }

    /// Human-readable rendering for `--format text`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: {} ({} ms)",
            self.command,
            serde_json::to_value(self.verdict)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            self.elapsed_ms
        );
        if let Some(err) = &self.error {
            out.push_str(&format!("\nerror: {err}"));
        }
        if let Some(bounds) = &self.bounds_used {
            out.push_str(&format!("\nbounds: {bounds}"));
        }
        if let Some(cert) = &self.certificate {
            let pretty = serde_json::to_string_pretty(cert).unwrap_or_else(|_| cert.to_string());
            out.push_str(&format!("\ncertificate:\n{pretty}"));
        }
        out
    }
}
