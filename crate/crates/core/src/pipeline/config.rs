use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExplainRows, PipelineError, Seeds, TrainingConfig};
use crate::analysis::RoleThresholds;
use crate::ingest::catalog::NON_SYNCHRONOUS;
use crate::ingest::{AggregationPolicy, EngineerOptions};
use crate::signal::{Area, ExtractOptions, Indicator, RocofParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaConfig {
    /// Short label used in artifact file names.
    pub name: String,
    pub area: Area,
    /// Raw 1 Hz recording with columns `timestamp_utc,frequency_hz`.
    pub frequency: PathBuf,
    /// Manifest of regional feature files.
    pub manifest: PathBuf,
    /// Overrides the area's default smoothing window and search half width.
    #[serde(default)]
    pub rocof: Option<RocofParams>,
}

impl AreaConfig {
    pub fn rocof_params(&self) -> RocofParams {
        self.rocof.unwrap_or_else(|| self.area.rocof_params())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainConfig {
    pub rows: ExplainRows,
    pub background_size: usize,
    /// Features per target in importance displays.
    pub top_k: usize,
    /// Features shown in the daily decomposition.
    pub daily_top_k: usize,
    /// Leading explained rows that also get interaction values.
    pub interaction_rows: usize,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self { rows: ExplainRows::All, background_size: 100, top_k: 5, daily_top_k: 4, interaction_rows: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub thresholds: RoleThresholds,
    /// Ramp rate per generation type, as a fraction of capacity per minute.
    pub ramp_rates: BTreeMap<String, f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self { thresholds: RoleThresholds::default(), ramp_rates: crate::ingest::synth::default_ramp_rates() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub seeds: Seeds,
    pub targets: Vec<Indicator>,
    pub extract: ExtractOptions,
    pub policy: AggregationPolicy,
    /// Generation types left out of the synchronous-generation sum.
    pub synchronous_exclude: Vec<String>,
    pub areas: Vec<AreaConfig>,
    pub training: TrainingConfig,
    pub explain: ExplainConfig,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            output_dir: "out".into(),
            seeds: Seeds::default(),
            targets: Indicator::ALL.to_vec(),
            extract: ExtractOptions::default(),
            policy: AggregationPolicy::default(),
            synchronous_exclude: NON_SYNCHRONOUS.iter().map(|s| s.to_string()).collect(),
            areas: Vec::new(),
            training: TrainingConfig::default(),
            explain: ExplainConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn engineer_options(&self) -> EngineerOptions {
        EngineerOptions { synchronous_exclude: self.synchronous_exclude.clone() }
    }

    pub fn area(&self, name: &str) -> Result<&AreaConfig, PipelineError> {
        self.areas.iter().find(|a| a.name == name).ok_or_else(|| PipelineError::Usage(format!("no area named {name:?} in the config")))
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.areas.is_empty() {
            return Err(PipelineError::Config("no areas defined".into()));
        }
        let mut names: Vec<&str> = self.areas.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(PipelineError::Config("area names must be unique".into()));
        }
        if let Some(bad) = self.areas.iter().find(|a| a.name.is_empty() || !a.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')) {
            return Err(PipelineError::Config(format!("area name {:?} must be non-empty ASCII letters, digits, '_' or '-'", bad.name)));
        }
        if self.targets.is_empty() {
            return Err(PipelineError::Config("no targets listed".into()));
        }
        for area in &self.areas {
            area.rocof_params().validate()?;
        }
        self.policy.validate()?;
        Ok(())
    }
}

/// A parsed config together with the digest of its exact bytes. Relative
/// paths are resolved against the config file's directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub path: PathBuf,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let bytes = fs::read(path).map_err(|e| PipelineError::Data { file: path.display().to_string(), message: e.to_string() })?;
        Self::from_bytes(&bytes, path)
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self, PipelineError> {
        let text = std::str::from_utf8(bytes).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut config: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.output_dir = base.join(&config.output_dir);
        for area in &mut config.areas {
            area.frequency = base.join(&area.frequency);
            area.manifest = base.join(&area.manifest);
        }
        Ok(Self { config, path: path.to_path_buf(), sha256: hex::encode(Sha256::digest(bytes)) })
    }

    /// Input files referenced by the config that do not exist.
    pub fn missing_inputs(&self) -> Vec<PathBuf> {
        self.config.areas.iter().flat_map(|a| [&a.frequency, &a.manifest]).filter(|p| !p.exists()).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
output_dir = "results"

[[areas]]
name = "ce"
area = "continental_europe"
frequency = "ce_frequency.csv"
manifest = "ce_manifest.csv"

[[areas]]
name = "nordic"
area = "nordic"
frequency = "n.csv"
manifest = "n_manifest.csv"
"#;

    #[test]
    fn defaults_and_area_window_parameters() {
        let c = LoadedConfig::from_bytes(MINIMAL.as_bytes(), Path::new("cfg/run.toml")).unwrap();
        assert_eq!(c.config.output_dir, PathBuf::from("cfg/results"));
        assert_eq!(c.config.areas[0].rocof_params(), RocofParams { smoothing_window: 60, search_half_width: 60 });
        assert_eq!(c.config.areas[1].rocof_params(), RocofParams { smoothing_window: 30, search_half_width: 30 });
        assert_eq!(c.config.policy.nan_share_threshold, 0.30);
        assert_eq!(c.config.explain.background_size, 100);
        assert_eq!(c.config.training.folds, 5);
        assert_eq!(c.sha256.len(), 64);
        assert_eq!(c.missing_inputs().len(), 4);
    }

    #[test]
    fn hash_tracks_bytes() {
        let a = LoadedConfig::from_bytes(MINIMAL.as_bytes(), Path::new("a.toml")).unwrap();
        let b = LoadedConfig::from_bytes(format!("{MINIMAL}\n").as_bytes(), Path::new("a.toml")).unwrap();
        assert_ne!(a.sha256, b.sha256);
        assert_eq!(a.config, b.config);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(LoadedConfig::from_bytes(b"output_dir = \"x\"", Path::new("a.toml")).is_err());
        let unknown = format!("{MINIMAL}\n[explain]\nbogus = 1\n");
        assert!(LoadedConfig::from_bytes(unknown.as_bytes(), Path::new("a.toml")).is_err());
        let dup = MINIMAL.replace("name = \"nordic\"", "name = \"ce\"");
        assert!(LoadedConfig::from_bytes(dup.as_bytes(), Path::new("a.toml")).is_err());
        let bad_policy = format!("{MINIMAL}\n[policy]\nnan_share_threshold = 0.0\n");
        assert!(LoadedConfig::from_bytes(bad_policy.as_bytes(), Path::new("a.toml")).is_err());
    }
}
