use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use super::document::FORMAT_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub kind: String,
    pub verdict: Verdict,
    pub summary: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
    pub witnesses: BTreeMap<String, Value>,
    pub tolerance: f64,
    pub seed: u64,
    /// Wall-clock time; shown in text reports only so structured output stays reproducible.
    #[serde(skip)]
    pub duration: Duration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub tolerance: f64,
    pub seed: u64,
    pub tally: Tally,
    pub checks: Vec<CheckReport>,
}

impl Report {
    /// Sorts checks by id.
    pub fn new(tolerance: f64, seed: u64, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut tally = Tally::default();
        for c in &checks {
            match c.verdict {
                Verdict::Pass => tally.pass += 1,
                Verdict::Fail => tally.fail += 1,
                Verdict::Error => tally.error += 1,
            }
        }
        Report {
            format_version: FORMAT_VERSION,
            tolerance,
            seed,
            tally,
            checks,
        }
    }

    /// 0 when everything passed, 2 on any error, otherwise 1.
    pub fn exit_code(&self) -> i32 {
        if self.tally.error > 0 {
            2
        } else if self.tally.fail > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            let t = report.tally;
            let _ = writeln!(
                out,
                "l0mod report v{}  tolerance={:e}  seed={}  checks={}  pass={} fail={} error={}",
                report.format_version,
                report.tolerance,
                report.seed,
                report.checks.len(),
                t.pass,
                t.fail,
                t.error
            );
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{:<5} {}  [{}]  {}  ({:.1} ms)",
                    c.verdict.label(),
                    c.id,
                    c.kind,
                    c.summary,
                    c.duration.as_secs_f64() * 1e3
                );
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(id: &str, verdict: Verdict) -> CheckReport {
        CheckReport {
            id: id.into(),
            kind: "greatest-element".into(),
            verdict,
            summary: "s".into(),
            provenance: vec![],
            witnesses: BTreeMap::new(),
            tolerance: 1e-9,
            seed: 0,
            duration: Duration::from_millis(3),
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new(1e-9, 0, vec![]);
        let text = emit_report(&r, Format::Text);
        assert_eq!(text.lines().count(), 1);
        assert!(text.contains("tolerance=1e-9") && text.contains("seed=0"));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn exit_codes_and_order() {
        let r = Report::new(
            1e-9,
            0,
            vec![check("b", Verdict::Pass), check("a", Verdict::Fail)],
        );
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.checks[0].id, "a");
        let r = Report::new(
            1e-9,
            0,
            vec![check("a", Verdict::Fail), check("c", Verdict::Error)],
        );
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn structured_output_omits_timing() {
        let r = Report::new(1e-9, 5, vec![check("a", Verdict::Pass)]);
        let s = emit_report(&r, Format::Structured);
        assert!(!s.contains("duration"));
        assert!(s.contains("\"seed\": 5"));
    }
}
