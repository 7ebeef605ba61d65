use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{PipelineError, Seeds};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stamp carried by every artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    /// Stage name to seed.
    pub seeds: BTreeMap<String, u64>,
}

impl Provenance {
    pub fn new(config_sha256: &str, seeds: Seeds) -> Self {
        let seeds = [("split", seeds.split), ("cv", seeds.cv), ("model", seeds.model), ("background", seeds.background)];
        Self::with_seeds(config_sha256, seeds.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn with_seeds(config_sha256: &str, seeds: BTreeMap<String, u64>) -> Self {
        Self { tool: "freqstab".into(), version: TOOL_VERSION.into(), config_sha256: config_sha256.into(), seeds }
    }

    fn header_lines(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# tool: {} {}\n# config_sha256: {}\n# seeds: {}\n", self.tool, self.version, self.config_sha256, seeds.join(" "))
    }
}

pub(crate) fn data_error(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Data { file: path.display().to_string(), message: e.to_string() }
}

fn ensure_parent(path: &Path) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| data_error(dir, e))?;
    }
    Ok(())
}

/// Writes a delimited table preceded by `#` provenance lines. The body is
/// produced into memory first so a failed writer leaves no partial file.
pub fn write_table<F, E>(path: &Path, provenance: &Provenance, body: F) -> Result<PathBuf, PipelineError>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), E>,
    E: std::fmt::Display,
{
    let mut buf = provenance.header_lines().into_bytes();
    body(&mut buf).map_err(|e| data_error(path, e))?;
    ensure_parent(path)?;
    fs::write(path, buf).map_err(|e| data_error(path, e))?;
    Ok(path.to_path_buf())
}

/// Writes plain rows with a header; cells are written verbatim.
pub fn write_rows(path: &Path, provenance: &Provenance, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, PipelineError> {
    write_table(path, provenance, |buf| -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(buf);
        wtr.write_record(header)?;
        for r in rows {
            wtr.write_record(r)?;
        }
        wtr.flush()?;
        Ok(())
    })
}

/// Writes `{"provenance": ..., <payload fields>}` as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, provenance: &Provenance, payload: &T) -> Result<PathBuf, PipelineError> {
    let mut value = serde_json::to_value(payload).map_err(|e| data_error(path, e))?;
    let obj = match &mut value {
        Value::Object(map) => map,
        _ => return Err(PipelineError::Invariant("artifact payload must be a JSON object".into())),
    };
    let mut out = serde_json::Map::new();
    out.insert("provenance".into(), serde_json::to_value(provenance).map_err(|e| data_error(path, e))?);
    out.append(obj);
    let mut text = serde_json::to_string_pretty(&Value::Object(out)).map_err(|e| data_error(path, e))?;
    text.push('\n');
    ensure_parent(path)?;
    let mut f = fs::File::create(path).map_err(|e| data_error(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| data_error(path, e))?;
    Ok(path.to_path_buf())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| data_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| data_error(path, e))
}

pub fn open(path: &Path) -> Result<fs::File, PipelineError> {
    fs::File::open(path).map_err(|e| data_error(path, e))
}

/// Artifact locations under the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf() }
    }

    pub fn indicators(&self, area: &str) -> PathBuf {
        self.root.join("indicators").join(format!("{area}.csv"))
    }

    pub fn nadir_histogram(&self, area: &str) -> PathBuf {
        self.root.join("indicators").join(format!("{area}_nadir_minutes.csv"))
    }

    pub fn features(&self, area: &str) -> PathBuf {
        self.root.join("features").join(format!("{area}.csv"))
    }

    pub fn features_meta(&self, area: &str) -> PathBuf {
        self.root.join("features").join(format!("{area}.meta.json"))
    }

    pub fn model(&self, area: &str, target: &str, scope: &str) -> PathBuf {
        self.root.join("models").join(format!("{area}_{target}_{scope}.json"))
    }

    pub fn training_log(&self, area: &str, target: &str, scope: &str) -> PathBuf {
        self.root.join("models").join(format!("{area}_{target}_{scope}_log.csv"))
    }

    pub fn evaluation(&self, area: &str, target: &str, scope: &str) -> PathBuf {
        self.root.join("models").join(format!("{area}_{target}_{scope}_eval.json"))
    }

    pub fn explain_dir(&self) -> PathBuf {
        self.root.join("explain")
    }

    pub fn explain(&self, area: &str, target: &str, what: &str, ext: &str) -> PathBuf {
        self.explain_dir().join(format!("{area}_{target}_{what}.{ext}"))
    }

    pub fn report(&self, name: &str) -> PathBuf {
        self.root.join("report").join(name)
    }
}
