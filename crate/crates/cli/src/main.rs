use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use lbcalc_cli::runner::{exit_code, render_json, render_text, run};
use lbcalc_cli::scenario::parse_scenario;
use lbcalc_cli::{render_json_batch, run_gallery};

/// Scenario runner for exact line-bundle calculus checks.
#[derive(Parser)]
#[command(name = "lbcalc", version, about)]
struct Args {
    /// Scenario file to run.
    #[arg(long, conflicts_with = "gallery")]
    scenario: Option<PathBuf>,

    /// Run every built-in gallery scenario.
    #[arg(long)]
    gallery: bool,

    /// Seed for randomized residual sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Run only checks whose name matches this `*`-glob.
    #[arg(long)]
    only: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let reports = if args.gallery {
        match run_gallery(args.seed, args.only.as_deref()) {
            Ok(r) => r,
            Err(err) => {
                eprintln!("error: {err:#}");
                return ExitCode::from(2);
            }
        }
    } else if let Some(path) = &args.scenario {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(err) => {
                eprintln!("error: cannot read {}: {err}", path.display());
                return ExitCode::from(2);
            }
        };
        let fallback = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "scenario".to_string());
        let scenario = match parse_scenario(&text, &fallback) {
            Ok(s) => s,
            Err(err) => {
                eprintln!("error: {err:#}");
                return ExitCode::from(2);
            }
        };
        vec![run(&scenario, args.seed, args.only.as_deref())]
    } else {
        eprintln!("error: pass --scenario <path> or --gallery");
        return ExitCode::from(2);
    };

    match args.format {
        Format::Text => {
            for report in &reports {
                print!("{}", render_text(report));
            }
        }
        Format::Json => {
            if reports.len() == 1 {
                println!("{}", render_json(&reports[0]));
            } else {
                println!("{}", render_json_batch(&reports));
            }
        }
    }
    ExitCode::from(exit_code(&reports) as u8)
}
