//! Thin command-line front end over the experiment harness.
//!
//! `bosegas run <config>` executes every experiment in the file and writes
//! one table per experiment to the output directory; the exit code is 0
//! only when all property suites pass. `validate` checks a config without
//! running it; `report` pretty-prints an exported JSON table.

use bosegas::harness::{export, run_all, ExportFormat, HarnessConfig, ResultTable};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bosegas", version, about = "bosonic ground-state scaling laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file and export the tables.
    Run {
        /// Configuration file (TOML or JSON).
        config: Option<PathBuf>,
        /// Alternative way to pass the configuration file.
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
        /// Output directory for the result tables.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Seed override (defaults to the config's seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to BOSEGAS_THREADS or all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Parse and validate a config file without running it.
    Validate {
        config: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
    },
    /// Pretty-print an exported JSON result table.
    Report { table: PathBuf },
}

fn resolve_config(positional: Option<PathBuf>, flag: Option<PathBuf>) -> Result<PathBuf, String> {
    positional
        .or(flag)
        .ok_or_else(|| "missing config path (positional or --config)".to_string())
}

fn configure_threads(requested: Option<usize>) {
    let from_env = std::env::var("BOSEGAS_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    if let Some(n) = requested.or(from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, config_flag, out, seed, threads, format } => {
            configure_threads(threads);
            let path = match resolve_config(config, config_flag) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let parsed = match HarnessConfig::load(&path) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let seed = seed.unwrap_or(parsed.seed);
            let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
            let outcomes = match run_all(&parsed, &base, seed) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let fmt = match format {
                Format::Csv => ExportFormat::Csv,
                Format::Json => ExportFormat::Json,
            };
            let mut all_passed = true;
            for outcome in &outcomes {
                all_passed &= outcome.passed;
                match export(&outcome.table, &out, &outcome.name, fmt) {
                    Ok(file) => println!(
                        "{} {:<24} {} -> {}",
                        if outcome.passed { "PASS" } else { "FAIL" },
                        outcome.name,
                        outcome.summary,
                        file.display()
                    ),
                    Err(e) => {
                        eprintln!("error exporting {}: {e}", outcome.name);
                        all_passed = false;
                    }
                }
            }
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Validate { config, config_flag } => {
            let path = match resolve_config(config, config_flag) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match HarnessConfig::load(&path)
                .and_then(|c| c.validate(path.parent().unwrap_or(Path::new("."))).map(|_| c))
            {
                Ok(c) => {
                    println!(
                        "ok: {} experiments, {} models, hash {}",
                        c.experiments.len(),
                        c.models.len(),
                        c.hash()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("invalid: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Report { table } => {
            let text = match std::fs::read_to_string(&table) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", table.display());
                    return ExitCode::from(2);
                }
            };
            match ResultTable::from_json(&text) {
                Ok(t) => {
                    println!(
                        "config {} seed {} version {}",
                        t.provenance.config_hash, t.provenance.seed, t.provenance.version
                    );
                    let header: Vec<&str> = t.schema.iter().map(|c| c.name.as_str()).collect();
                    println!("{}", header.join(" | "));
                    for row in &t.rows {
                        let cells: Vec<String> = row
                            .iter()
                            .map(|v| match v {
                                bosegas::harness::Value::Int(i) => format!("{i}"),
                                bosegas::harness::Value::Float(f) => format!("{f:.9}"),
                                bosegas::harness::Value::Text(s) => s.clone(),
                            })
                            .collect();
                        println!("{}", cells.join(" | "));
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
