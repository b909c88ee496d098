//! Scenario runner: executes checks (in parallel — they are pure), matches
//! verdicts against expectations, and assembles the run report.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use lbcalc::report::{StructureReport, Verdict};

use crate::checks::run_check;
use crate::scenario::Scenario;

/// Outcome of one check, with its expectation.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: String,
    pub expect: String,
    pub outcome: String,
    pub matched: bool,
    pub report: StructureReport,
    /// Wall-clock milliseconds; excluded from the canonical JSON encoding
    /// so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

/// Deterministic report of one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub scenario: String,
    pub seed: u64,
    pub ok: bool,
    pub checks: Vec<CheckOutcome>,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Unknown => "unknown",
    }
}

/// Executes every check of the scenario with the given seed. Checks run in
/// parallel; the report preserves declaration order. `only` filters checks
/// by a `*`-glob on their names.
pub fn run(scenario: &Scenario, seed: u64, only: Option<&str>) -> RunReport {
    let selected: Vec<(usize, String)> = scenario
        .checks
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let name = c
                .name
                .clone()
                .unwrap_or_else(|| format!("{}:{i}", c.kind));
            (i, name)
        })
        .filter(|(_, name)| only.map(|g| glob_match(g, name)).unwrap_or(true))
        .collect();

    let checks: Vec<CheckOutcome> = selected
        .par_iter()
        .map(|(i, name)| {
            let decl = &scenario.checks[*i];
            let start = Instant::now();
            let (report, outcome) = match run_check(scenario, decl, seed) {
                Ok(report) => {
                    let outcome = verdict_name(report.overall).to_string();
                    (report, outcome)
                }
                Err(err) => {
                    // Errors (degenerate inputs, shape mismatches) surface as
                    // a failing pseudo-axiom so expectations can target them.
                    let mut report = StructureReport::new(&decl.kind, seed);
                    report.push(lbcalc::report::AxiomCheck {
                        name: "error".to_string(),
                        anchor: "runner.error".to_string(),
                        verdict: lbcalc::expr::ZeroVerdict::NonZero {
                            witness: lbcalc::expr::Witness {
                                point: Vec::new(),
                                value: format!("{err}"),
                            },
                        },
                        sampled: false,
                    });
                    (report, "fail".to_string())
                }
            };
            let matched = outcome == decl.expect;
            CheckOutcome {
                name: name.clone(),
                kind: decl.kind.clone(),
                expect: decl.expect.clone(),
                outcome,
                matched,
                report,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();

    let ok = checks.iter().all(|c| c.matched);
    RunReport {
        schema: 1,
        scenario: scenario.name.clone(),
        seed,
        ok,
        checks,
    }
}

/// Exit code contract: 0 when every expectation matched, 1 otherwise.
/// (Parse and validation failures exit with 2 before a report exists.)
pub fn exit_code(reports: &[RunReport]) -> i32 {
    if reports.iter().all(|r| r.ok) {
        0
    } else {
        1
    }
}

/// Minimal `*`-glob matcher for check-name filters.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    fn inner(p: &[u8], t: &[u8]) -> bool {
        match (p.first(), t.first()) {
            (None, None) => true,
            (Some(b'*'), _) => {
                inner(&p[1..], t) || (!t.is_empty() && inner(p, &t[1..]))
            }
            (Some(pc), Some(tc)) if pc == tc => inner(&p[1..], &t[1..]),
            _ => false,
        }
    }
    inner(pattern.as_bytes(), text.as_bytes())
}

/// Human-readable text rendering (includes timings).
pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "scenario {} (seed {})\n",
        report.scenario, report.seed
    ));
    for c in &report.checks {
        let marker = if c.matched { "ok " } else { "FAIL" };
        out.push_str(&format!(
            "  [{marker}] {} ({}) -> {} (expected {}) [{:.1} ms]\n",
            c.name, c.kind, c.outcome, c.expect, c.elapsed_ms
        ));
        for ax in &c.report.axioms {
            let v = match &ax.verdict {
                lbcalc::expr::ZeroVerdict::Zero => "zero".to_string(),
                lbcalc::expr::ZeroVerdict::Unknown => "unknown (sampled)".to_string(),
                lbcalc::expr::ZeroVerdict::NonZero { witness } => {
                    format!("NONZERO (witness {})", witness.value)
                }
            };
            out.push_str(&format!("        {:<28} {}\n", ax.name, v));
        }
    }
    out.push_str(&format!(
        "result: {}\n",
        if report.ok { "ok" } else { "MISMATCH" }
    ));
    out
}

/// Canonical JSON rendering; deterministic for a fixed (scenario, seed).
pub fn render_json(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("serializable report")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_matching() {
        assert!(glob_match("*", "anything"));
        assert!(glob_match("verify_*", "verify_poisson:0"));
        assert!(!glob_match("verify_*", "certify:1"));
        assert!(glob_match("*poisson*", "verify_poisson:0"));
    }
}
