//! Scenario loader, check runner and report emitter for the line-bundle
//! calculus library. The binary in `main.rs` is a thin wrapper over this
//! API so runs are scriptable and testable in-process.

pub mod checks;
pub mod gallery;
pub mod parse;
pub mod runner;
pub mod scenario;

use anyhow::Result;

use runner::RunReport;

/// Runs the complete built-in gallery with one seed.
pub fn run_gallery(seed: u64, only: Option<&str>) -> Result<Vec<RunReport>> {
    let scenarios = gallery::gallery()?;
    Ok(scenarios
        .iter()
        .map(|s| runner::run(s, seed, only))
        .collect())
}

/// Canonical JSON for a batch of runs (deterministic for fixed inputs).
pub fn render_json_batch(reports: &[RunReport]) -> String {
    serde_json::to_string_pretty(reports).expect("serializable reports")
}
