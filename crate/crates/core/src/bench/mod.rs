//! Experiment harness: configuration, the single-realisation reconstruction
//! comparison, the MSE-versus-compression sweep, and CSV/SVG emission.

mod config;
mod harness;
mod output;
mod plot;

pub use config::{
    load_config, load_config_with, parse_config, ExperimentSpec, Grouping, Overrides, VariantEntry, DEFAULT_MU_GRID,
};
pub use harness::{
    run_mse_sweep, run_reconstruction, Reconstruction, Sweep, SweepCell, TrialResult, VariantRun,
};
pub use output::{emit_outputs, RunResults};
pub use plot::{line_plot, Series};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid configuration field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("solver failure in variant `{variant}`: {source}")]
    Solver {
        variant: String,
        #[source]
        source: crate::Error,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl BenchError {
    /// Process exit code: 1 validation, 2 solver failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Parse { .. } | BenchError::Validation { .. } => 1,
            BenchError::Solver { .. } => 2,
            BenchError::Io { .. } => 3,
        }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl ToString) -> Self {
        BenchError::Validation {
            field: field.into(),
            reason: reason.to_string(),
        }
    }
}
