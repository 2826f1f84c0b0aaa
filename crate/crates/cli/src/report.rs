use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "kspenta.run-report/1";

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs_digest: String,
    pub passed: bool,
    /// Headline values repeated at top level for scripts, e.g. `count`.
    #[serde(flatten)]
    pub headline: serde_json::Map<String, Value>,
    pub checks: Vec<CheckResult>,
    pub outputs: Value,
}

/// What a subcommand hands back: the structured report plus its rendering
/// for a terminal.
pub struct Outcome {
    pub report: RunReport,
    pub text: String,
    /// Print `text` alone, without the check list.
    pub raw: bool,
}

/// Hashes labeled input chunks; the label and length framing keeps
/// different splits of the same bytes apart.
#[derive(Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) -> &mut Self {
        for part in [label.as_bytes(), bytes] {
            self.0.update((part.len() as u64).to_le_bytes());
            self.0.update(part);
        }
        self
    }

    pub fn add_json<T: Serialize + ?Sized>(&mut self, label: &str, value: &T) -> &mut Self {
        let bytes = serde_json::to_vec(value).expect("input data serializes");
        self.add(label, &bytes)
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

pub struct ReportBuilder {
    command: String,
    digest: String,
    checks: Vec<CheckResult>,
    headline: serde_json::Map<String, Value>,
}

impl ReportBuilder {
    pub fn new(command: &str, digest: InputDigest) -> Self {
        ReportBuilder { command: command.into(), digest: digest.finish(), checks: Vec::new(), headline: Default::default() }
    }

    pub fn check(&mut self, name: &str, pass: bool, details: impl Into<String>) -> &mut Self {
        self.checks.push(CheckResult { name: name.into(), pass, details: details.into() });
        self
    }

    pub fn headline(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.headline.insert(key.into(), value.into());
        self
    }

    pub fn finish(self, outputs: Value) -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            passed: self.checks.iter().all(|c| c.pass),
            command: self.command,
            inputs_digest: self.digest,
            headline: self.headline,
            checks: self.checks,
            outputs,
        }
    }
}

pub fn render_checks(report: &RunReport) -> String {
    let mut s = String::from("\nchecks\n");
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &report.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "  {tag}  {:width$}  {}", c.name, c.details);
    }
    let _ = writeln!(s, "\n{}", if report.passed { "all checks passed" } else { "some checks FAILED" });
    s
}
