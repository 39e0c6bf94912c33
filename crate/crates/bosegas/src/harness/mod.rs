//! Experiment orchestration: configuration, runners, result tables and
//! deterministic CSV/JSON export.
//!
//! Every experiment is a pure function of `(config, seed)`: re-runs produce
//! byte-identical exports. Row failures are recorded in the table and never
//! abort a sweep.

pub mod config;
pub mod experiments;
pub mod table;

pub use config::{
    BornSpec, DefinettiFamily, ExperimentConfig, ExperimentKind, HarnessConfig, PotentialSpec,
};
pub use experiments::{
    gap_fit, run_all, run_experiment, standalone_provenance, toy_two_mode_model,
    ExperimentOutcome,
};
pub use table::{fnv1a_hex, linear_fit, Column, Provenance, ResultTable, Value};

use crate::Result;
use std::path::Path;

/// Export format for result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

/// Write one table to `<dir>/<name>.<ext>`; output is bit-stable for a
/// fixed config hash and seed.
pub fn export(table: &ResultTable, dir: &Path, name: &str, format: ExportFormat) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.{}", format.extension()));
    let payload = match format {
        ExportFormat::Csv => table.to_csv(),
        ExportFormat::Json => table.to_json(),
    };
    std::fs::write(&path, payload)?;
    Ok(path)
}
