//! `kgrowth <mode> [--config <path>] [--out <dir>] [--key=value ...]`
//!
//! Exit codes: 0 success, 1 solver or I/O error, 2 a solver did not
//! converge, 3 invalid configuration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod run;

use clap::Parser;
use config::{parse_config, Mode};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "kgrowth",
    version,
    about = "Knowledge-growth solvers: time-dependent runs, balanced growth paths, sweeps",
    after_help = "Any other config key can be given as --key=value and overrides the file."
)]
struct Cli {
    /// Solver to run; may instead be set by `mode` in the config.
    #[arg(value_enum)]
    mode: Option<Mode>,
    /// TOML file with config keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_SOLVER: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INVALID: u8 = 3;

/// Splits `--key=value` overrides from the arguments clap understands.
fn split_args(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut known = Vec::new();
    let mut overrides = Vec::new();
    for a in args {
        match a.strip_prefix("--").and_then(|r| r.split_once('=')) {
            Some((k, v)) if k != "config" && k != "out" => overrides.push((k.to_string(), v.to_string())),
            _ => known.push(a),
        }
    }
    (known, overrides)
}

fn threads() -> Result<Option<usize>, String> {
    match std::env::var("KG_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("KG_THREADS: must be a positive integer, got `{v}`")),
        },
    }
}

fn main() -> ExitCode {
    let (known, overrides) = split_args(std::env::args().collect());
    let cli = match Cli::try_parse_from(known) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let spec = match parse_config(cli.config.as_deref(), &overrides, cli.mode, cli.out.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("kgrowth: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let threads = match threads() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("kgrowth: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&spec.out) {
        eprintln!("kgrowth: output directory {}: {e}", spec.out.display());
        return ExitCode::from(EXIT_INVALID);
    }
    let (status, code, results, error) = match run::execute(&spec, threads) {
        Ok(o) if o.converged => ("ok", 0, o.results, None),
        Ok(o) => ("not_converged", EXIT_NOT_CONVERGED, o.results, None),
        Err(e) => ("error", EXIT_SOLVER, serde_json::Value::Null, Some(e.to_string())),
    };
    let report = json!({
        "mode": spec.mode,
        "status": status,
        "exit_code": code,
        "error": error,
        "config": spec,
        "results": results,
    });
    if let Err(e) = output::write_report(&spec.out.join("report.json"), &report) {
        eprintln!("kgrowth: writing report: {e}");
        return ExitCode::from(EXIT_SOLVER);
    }
    if let Some(e) = &error {
        eprintln!("kgrowth: {e}");
    } else if code == EXIT_NOT_CONVERGED {
        eprintln!(
            "kgrowth: solver did not converge; see {}",
            spec.out.join("report.json").display()
        );
    }
    ExitCode::from(code)
}
