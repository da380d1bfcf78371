//! Scenario registry and batch runner for the structure-preserving spectral
//! solvers in `triwave`.
//!
//! The library half of the command-line tool: a registry of named experiment
//! setups ([`scenario`]), a runner that integrates them and records invariant
//! drifts, errors against a reference, and relaxation histories ([`run`]),
//! parameter studies built on top of the runner ([`studies`]), wall-clock
//! benchmarks ([`bench`]), and CSV/JSON writers ([`output`]).

pub mod bench;
pub mod output;
pub mod run;
pub mod scenario;
pub mod studies;

use std::path::PathBuf;

use thiserror::Error;
use triwave::{ModelError, RelaxError, SpectralError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown scenario `{0}` (run `triwave list-scenarios`)")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` integrates the {expected} equation, not {requested}")]
    EquationMismatch {
        scenario: String,
        expected: &'static str,
        requested: String,
    },
    #[error("unknown tableau `{0}`: not a builtin (ark436, ark548, rk4) and not a readable file")]
    UnknownTableau(String),
    #[error("unknown bench case `{0}` (available: bbm-s5, nls-s5)")]
    UnknownBenchCase(String),
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("integration failed at step {step}: {source} (state snapshot: {snapshot})")]
    Numerical {
        step: usize,
        source: RelaxError,
        snapshot: String,
    },
    #[error("solution lost finiteness at step {step}, t = {t:.6} (state snapshot: {snapshot})")]
    NonFinite {
        step: usize,
        t: f64,
        snapshot: String,
    },
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl CliError {
    /// Process exit code: 1 for usage errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownScenario(_)
            | CliError::EquationMismatch { .. }
            | CliError::UnknownTableau(_)
            | CliError::UnknownBenchCase(_)
            | CliError::InvalidConfig(_) => 1,
            _ => 2,
        }
    }
}
