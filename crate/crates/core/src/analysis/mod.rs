//! Benchmarking against the daily-profile null model, gain accounting,
//! relative ramp speeds with RoCoF role classification, and Pearson
//! correlation diagnostics.

mod correlation;
mod metrics;
mod profile;
mod ramps;
mod report;

pub use correlation::{cross_correlation, pearson_matrix, CorrelationTable, MIN_PAIRS};
pub use metrics::{pearson, r2_score};
pub use profile::DailyProfilePredictor;
pub use ramps::{classify_rocof_role, relative_ramp_speeds, RampSpeedRow, RampSpeedTable, RocofRole, RoleThresholds, TechnologySeries};
pub use report::{gain, PerformanceReport, PerformanceRow, ScenarioPredictions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("target has zero variance")]
    ZeroVariance,
    #[error("hour of day {0} has no training sample")]
    MissingHourBin(u32),
    #[error("hour of day {0} is out of range")]
    InvalidHour(u32),
    #[error("series {0:?} has no valid ramps")]
    EmptySeries(String),
    #[error("ramp rate for {name:?} must be positive and finite, got {rate}")]
    InvalidRampRate { name: String, rate: f64 },
}
