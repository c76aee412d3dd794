//! Human and machine renderings of a run.

use std::fmt::Write;

use serde_json::{json, Value};

use crate::run::{CheckReport, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "machine" => Ok(Format::Machine),
            _ => Err(format!("unknown format `{s}`, expected human or machine")),
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn check_json(c: &CheckReport, timing: bool) -> Value {
    let mut v = json!({
        "name": c.name,
        "kind": c.kind,
        "expected": c.expected,
        "outcome": c.outcome,
        "verdict": verdict(c.passed),
        "detail": c.detail,
        "mismatches": c.mismatches,
        "witness": c.witness,
    });
    if timing {
        v["time_us"] = json!(c.micros);
    }
    v
}

/// One JSON object per run. Keys are sorted, so equal runs give equal bytes.
pub fn machine(r: &Report, timing: bool) -> String {
    let v = json!({
        "scenario": r.scenario,
        "verdict": verdict(r.passed()),
        "checks": r.checks.iter().map(|c| check_json(c, timing)).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string(&v).expect("report serializes");
    s.push('\n');
    s
}

pub fn human(r: &Report, timing: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}", r.scenario);
    let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &r.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = write!(out, "{status}  {:<width$}  {} (expected {})", c.name, c.outcome, c.expected);
        if timing {
            let _ = write!(out, "  [{:.3} ms]", c.micros as f64 / 1000.0);
        }
        out.push('\n');
        if !c.detail.is_empty() {
            let _ = writeln!(out, "      {}", c.detail);
        }
        for m in &c.mismatches {
            let _ = writeln!(out, "      mismatch: {m}");
        }
    }
    let passed = r.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(
        out,
        "{}: {passed}/{} checks passed",
        if r.passed() { "PASS" } else { "FAIL" },
        r.checks.len()
    );
    out
}

pub fn render(r: &Report, format: Format, timing: bool) -> String {
    match format {
        Format::Human => human(r, timing),
        Format::Machine => machine(r, timing),
    }
}
