//! Orchestration of the full analysis: extraction, feature preparation,
//! training, attribution and reporting, driven by one configuration file.
//!
//! Every artifact starts with its provenance (tool version, config digest,
//! seeds) and contains nothing run-dependent, so identical inputs give
//! byte-identical outputs.

pub mod artifacts;
mod commands;
pub mod config;
mod protocol;
mod synth_cmd;

use thiserror::Error;

pub use artifacts::{Layout, Provenance};
pub use commands::{
    cmd_explain, cmd_extract, cmd_features, cmd_report, cmd_train, read_model, slug, AggregateSummary, Context, Evaluation, ExplainSummary,
    FeaturesMeta, ReportFile, TopUnion, ADDITIVITY_TOLERANCE, DAILY_TOLERANCE,
};
pub use config::{AreaConfig, ExplainConfig, LoadedConfig, PipelineConfig, ReportConfig};
pub use protocol::{
    background_rows, explain_rows, prepare_features, profile_predictions, target_data, train_on_split, train_protocol, ExplainRows, PreparedFeatures, Scope,
    Seeds, TargetData, TrainOutcome, TrainingConfig,
};
pub use synth_cmd::{area_label, cmd_synth, quick_training};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{file}: {message}")]
    Data { file: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Signal(#[from] crate::signal::SignalError),
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
    #[error(transparent)]
    Boost(#[from] crate::boosting::BoostError),
    #[error(transparent)]
    Explain(#[from] crate::explain::ExplainError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
}

impl PipelineError {
    /// Process exit status: 1 usage, 2 data, 3 invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 1,
            Self::Invariant(_) => 3,
            _ => 2,
        }
    }
}
