//! Experiment runner: resolves a config, runs one experiment and renders its
//! JSON report (plus a CSV table for landscapes).
//!
//! Reports embed the resolved config and seed and carry no timestamps, so the
//! same config and seed always produce byte-identical output.

pub mod config;
pub mod experiments;
pub mod golden;
pub mod verify;

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub use config::{ExperimentConfig, ExperimentKind};

use crate::bloch_grid::GridError;
use crate::gate_compile::CompileError;
use crate::mdp::MdpError;
use crate::state_prep::PrepError;
use crate::su2::Su2Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

impl HarnessError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "usage",
            HarnessError::Io { .. } => "io",
            HarnessError::Prep(_) => "state-prep",
            HarnessError::Compile(_) => "compile",
            HarnessError::Mdp(_) => "solver",
            HarnessError::Grid(_) => "grid",
            HarnessError::Su2(_) => "su2",
        }
    }

    /// Machine-readable error document.
    pub fn report(&self) -> Value {
        json!({ "schema_version": SCHEMA_VERSION, "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Value,
    /// Landscape table, when the experiment produces one.
    pub csv: Option<String>,
    /// False when verification found a failing criterion.
    pub success: bool,
}

fn document<T: Serialize>(config: &ExperimentConfig, result: T) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": config.kind.name(),
        "seed": config.seed,
        "config": config.resolved(),
        "result": result,
    })
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    let done = |report| {
        Ok(RunOutput {
            report,
            csv: None,
            success: true,
        })
    };
    match config.kind {
        ExperimentKind::StatePrep => done(document(config, experiments::state_prep(config)?)),
        ExperimentKind::HtStates => done(document(config, experiments::ht_states(config)?)),
        ExperimentKind::Compile => done(document(config, experiments::compile(config, true)?)),
        ExperimentKind::BruteForce => done(document(config, experiments::compile(config, false)?)),
        ExperimentKind::Landscape => {
            let rows = experiments::landscape(config)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row)
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
            }
            let csv = String::from_utf8(
                w.into_inner()
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
            )
            .expect("csv output is utf-8");
            Ok(RunOutput {
                report: document(config, &rows),
                csv: Some(csv),
                success: true,
            })
        }
        ExperimentKind::Verify => {
            let reports = experiments::verify(config);
            let success = reports.iter().all(|r| r.passed);
            Ok(RunOutput {
                report: document(config, &reports),
                csv: None,
                success,
            })
        }
    }
}

/// Writes the JSON report to `path` and any CSV next to it (same stem, `.csv`).
pub fn write_outputs(output: &RunOutput, path: &Path) -> Result<(), HarnessError> {
    let json_path = if path.extension().is_some_and(|e| e == "csv") {
        path.with_extension("json")
    } else {
        path.to_path_buf()
    };
    let text = serde_json::to_string_pretty(&output.report).expect("reports serialize") + "\n";
    std::fs::write(&json_path, text).map_err(|e| HarnessError::io(&json_path, e))?;
    if let Some(csv) = &output.csv {
        let csv_path = path.with_extension("csv");
        std::fs::write(&csv_path, csv).map_err(|e| HarnessError::io(&csv_path, e))?;
    }
    Ok(())
}
