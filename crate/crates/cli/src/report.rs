//! Machine-readable reports: a JSON envelope carrying the fully resolved
//! configuration (reruns must be byte-identical), the numeric results, the
//! mathematical claim each verdict instantiates, and the verdict itself.

use meanapprox::certificates::Verdict;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    pub claims: Vec<&'static str>,
    pub verdict: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "claims": self.claims,
            "verdict": self.verdict,
        })
    }

    pub fn write(&self, out: &Option<PathBuf>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("report serialization");
        match out {
            Some(path) => std::fs::write(path, text + "\n"),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                writeln!(lock, "{text}")
            }
        }
    }
}

/// Exit code contract: 0 success/certified, 2 refuted, 3 inconclusive
/// (errors exit 1 from main).
pub fn verdict_exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Certified(_) => 0,
        Verdict::Refuted(_) => 2,
        Verdict::Inconclusive { .. } => 3,
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Certified(w) | Verdict::Refuted(w) => json!({
            "status": v.label(),
            "witness": {
                "description": w.description,
                "moment_index": w.moment_index,
                "location": w.location,
                "value": w.value,
            },
        }),
        Verdict::Inconclusive {
            blocking_tolerance,
            detail,
        } => json!({
            "status": v.label(),
            "blocking_tolerance": blocking_tolerance,
            "detail": detail,
        }),
    }
}

pub fn complex_json(v: meanapprox::Complex64) -> Value {
    json!([v.re, v.im])
}

pub fn coeffs_json(c: &[meanapprox::Complex64]) -> Value {
    Value::Array(c.iter().map(|&v| complex_json(v)).collect())
}
