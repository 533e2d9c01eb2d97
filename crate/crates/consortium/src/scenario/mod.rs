//! Scenario files, the end-to-end pipeline, sweeps, and reports.

mod config;
mod pipeline;
mod reference;
mod report;
mod sweep;

pub use config::{
    default_scenario, load_scenario, parse_scenario, Scenario, ScenarioCp, SweepOutputs,
    SweepParameter, SweepSpec, DEFAULT_ELASTICITY,
};
pub use pipeline::{run_pipeline, BargainSection, CpReport, PayoffSection, PipelineReport};
pub use reference::{
    reproduce_reference_tables, ReferenceCell, ReferenceRegime, Tolerance, NNN_TABLE, NN_TABLE,
};
pub use report::{
    bargain_trace_csv, reference_csv, render_reference_diff, render_text, report_csv, sweep_csv,
    write_atomic,
};
pub use sweep::{run_sweep, SweepPoint};

use crate::bargain::BargainError;
use crate::design::DesignError;
use crate::game::GameError;
use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario field {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cp {index}: {source}")]
    Cp { index: usize, source: DesignError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Bargain(#[from] BargainError),
    #[error("scenario has no sweep section")]
    NoSweep,
}

impl ScenarioError {
    /// Process exit code: 1 for input problems, 2 for internal
    /// consistency failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. }
            | ScenarioError::Parse(_)
            | ScenarioError::Invalid { .. }
            | ScenarioError::Model(_)
            | ScenarioError::NoSweep => 1,
            ScenarioError::Cp { source, .. } => match source {
                DesignError::Model(_) => 1,
                DesignError::UnboundedProfit => 1,
                DesignError::NonConvergence { .. } => 2,
            },
            ScenarioError::Game(source) => match source {
                GameError::SettlementIdentity { .. } => 2,
                _ => 1,
            },
            ScenarioError::Bargain(source) => match source {
                BargainError::SingularSystem => 2,
                _ => 1,
            },
        }
    }
}
