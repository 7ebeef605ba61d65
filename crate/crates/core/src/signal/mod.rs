//! Hourly frequency-stability indicators from 1 Hz frequency recordings.
//!
//! Each hour `t_i` is summarised by four numbers: the signed maximum
//! deviation (Nadir), the steepest smoothed slope around the hour boundary
//! (RoCoF), the mean square deviation (MSD) and the integrated deviation
//! (Integral). Any missing sample inside a window poisons the affected
//! value.

mod indicators;
pub mod io;
mod trace;

use chrono::{DateTime, Utc};
use thiserror::Error;

pub use indicators::{
    compute_integral, compute_msd, compute_nadir, compute_rocof, estimate_derivative, extract_indicators,
    nadir_occurrence_histogram, ExtractOptions, Indicator, IndicatorTable, NadirHistogram,
};
pub use trace::{Area, FrequencyTrace, HourWindow, RocofParams, GAMMA, HOURLY_SAMPLES, NOMINAL_HZ, SANITY_BOUND_HZ};

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("window contains missing samples")]
    MissingData,
    #[error("trace does not cover a complete hour")]
    EmptyTrace,
    #[error("trace start {0} is not on an hour boundary")]
    UnalignedStart(DateTime<Utc>),
    #[error("value count {values} does not match mask length {mask}")]
    MaskLength { values: usize, mask: usize },
    #[error("invalid RoCoF parameters {0:?}: need L >= 1 and 1 <= T <= 1800")]
    InvalidRocofParams(RocofParams),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
