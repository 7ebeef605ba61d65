//! External-feature preparation: regional series are downsampled to hours,
//! summed to area level under a missing-share budget, cleaned of outliers
//! and expanded into ramps, forecast errors and calendar columns.
//!
//! Forecast errors are always day-ahead minus actual.

mod aggregate;
mod area;
pub mod catalog;
mod features;
mod files;
mod series;
pub mod synth;

use thiserror::Error;

pub use aggregate::{aggregate_regions, clean_outliers, weighted_price_average, AggregationPolicy, AreaAggregate, Bounds, OmittedRegion, PriceAverage};
pub use area::{assemble_area, AreaInputs};
pub use catalog::{catalog, feature_spec, Availability, FeatureSpec, Unit};
pub use features::{engineer_features, ColumnMetadata, EngineerOptions, FeatureColumn, FeatureFrame, RAMP_DT_HOURS};
pub use files::{
    load_manifest_series, read_manifest, read_manifest_from, read_region_series_from, write_manifest, write_region_series, ManifestEntry,
    MANIFEST_HEADER, REGION_HEADER,
};
pub use series::{downsample_to_hourly, HourlySeries, RawSeries, RegionSeries};
pub use synth::{generate_leakage_dataset, generate_synthetic_area, GroundTruth, LeakageData, Scenario, SynthOptions, SyntheticArea};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{region}/{feature}: irregular cadence: {detail}")]
    IrregularCadence { region: String, feature: String, detail: String },
    #[error("{region}/{feature}: series is empty")]
    EmptySeries { region: String, feature: String },
    #[error("no regional series supplied")]
    NoRegions,
    #[error("regions disagree on feature or unit: expected {expected}, got {got}")]
    MixedRegions { expected: String, got: String },
    #[error("region {0} appears twice")]
    DuplicateRegion(String),
    #[error("invalid aggregation policy: {0}")]
    InvalidPolicy(String),
    #[error("no mean load for price region {0}")]
    MissingWeight(String),
    #[error("price weight of region {region} must be positive and finite, got {weight}")]
    InvalidWeight { region: String, weight: f64 },
    #[error("unknown feature name {0:?}")]
    UnknownFeatureName(String),
    #[error("manifest {0} lists no files")]
    EmptyManifest(String),
    #[error("{file}, line {line}: {message}")]
    Parse { file: String, line: u64, message: String },
    #[error("{file}: {source}")]
    File { file: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
