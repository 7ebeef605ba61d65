use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::artifacts::{data_error, write_json, write_table, Provenance};
use super::config::{AreaConfig, PipelineConfig};
use super::{PipelineError, TrainingConfig};
use crate::boosting::{GbtParams, ParamGrid};
use crate::ingest::{feature_spec, generate_synthetic_area, write_manifest, write_region_series, Availability, ManifestEntry, SynthOptions, SyntheticArea};
use crate::signal::io::write_trace;
use crate::signal::Area;

use super::commands::slug;

/// Small grid that keeps synthetic end-to-end runs quick.
pub fn quick_training() -> TrainingConfig {
    TrainingConfig {
        folds: 5,
        grid: ParamGrid {
            max_depth: vec![3, 5],
            learning_rate: vec![0.1],
            min_child_weight: vec![1.0],
            subsample: vec![0.8],
            l2_reg: vec![1.0],
            base: GbtParams { max_rounds: 300, ..GbtParams::default() },
        },
    }
}

pub fn area_label(area: Area) -> &'static str {
    match area {
        Area::ContinentalEurope => "ce",
        Area::Nordic => "nordic",
        Area::GreatBritain => "gb",
    }
}

/// Writes a synthetic area as pipeline inputs: the raw frequency file, one
/// file per region and feature, a manifest, the ground truth and a config
/// that runs the whole pipeline on them.
pub fn cmd_synth(out_dir: &Path, options: &SynthOptions) -> Result<(SyntheticArea, Vec<PathBuf>), PipelineError> {
    let options_json = serde_json::to_string(options).map_err(|e| PipelineError::Invariant(e.to_string()))?;
    let hash = hex::encode(Sha256::digest(options_json.as_bytes()));
    let prov = Provenance::with_seeds(&hash, [("synth".to_string(), options.seed)].into_iter().collect());
    let synth = generate_synthetic_area(options);
    let mut written = Vec::new();

    written.push(write_table(&out_dir.join("frequency.csv"), &prov, |buf| write_trace(&synth.trace, buf))?);
    let mut entries = Vec::new();
    for raw in &synth.raw {
        let file = PathBuf::from("regions").join(format!("{}_{}.csv", raw.region.to_ascii_lowercase(), slug(&raw.feature)));
        written.push(write_table(&out_dir.join(&file), &prov, |buf| write_region_series(raw, buf))?);
        let availability = feature_spec(&raw.feature).map_or(Availability::ExPost, |s| s.availability);
        entries.push(ManifestEntry { file, region: raw.region.clone(), feature: raw.feature.clone(), unit: raw.unit, availability });
    }
    written.push(write_table(&out_dir.join("manifest.csv"), &prov, |buf| write_manifest(&entries, buf))?);
    written.push(write_json(&out_dir.join("truth.json"), &prov, &synth.truth)?);

    let area = options.scenario.area();
    let config = PipelineConfig {
        output_dir: "out".into(),
        areas: vec![AreaConfig { name: area_label(area).into(), area, frequency: "frequency.csv".into(), manifest: "manifest.csv".into(), rocof: None }],
        training: quick_training(),
        ..PipelineConfig::default()
    };
    let text = toml::to_string(&config).map_err(|e| PipelineError::Invariant(e.to_string()))?;
    let path = out_dir.join("config.toml");
    std::fs::write(&path, format!("# synthetic {} area, seed {}\n{text}", options.scenario.as_str(), options.seed)).map_err(|e| data_error(&path, e))?;
    written.push(path);
    Ok((synth, written))
}
