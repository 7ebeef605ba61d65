use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::catalog::{Availability, Unit};
use super::{IngestError, RawSeries};
use crate::signal::io::{format_value, parse_value};
use crate::time::{format_utc, parse_utc};

pub const MANIFEST_HEADER: [&str; 5] = ["file", "region", "feature", "unit", "availability"];
pub const REGION_HEADER: [&str; 2] = ["timestamp_utc", "value"];

/// One manifest row: a region file and what it contains. `file` is relative
/// to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: PathBuf,
    pub region: String,
    pub feature: String,
    pub unit: Unit,
    pub availability: Availability,
}

fn parse_err(file: &Path, line: u64, message: impl Into<String>) -> IngestError {
    IngestError::Parse { file: file.display().to_string(), line, message: message.into() }
}

pub fn read_manifest_from<R: Read>(reader: R, name: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(name, 1, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
        return Err(parse_err(name, 1, format!("expected header {}", MANIFEST_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(name, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let unit = Unit::parse(&record[3]).ok_or_else(|| parse_err(name, line, format!("unknown unit {:?}", &record[3])))?;
        let availability =
            Availability::parse(&record[4]).ok_or_else(|| parse_err(name, line, format!("unknown availability {:?}", &record[4])))?;
        out.push(ManifestEntry { file: record[0].into(), region: record[1].into(), feature: record[2].into(), unit, availability });
    }
    if out.is_empty() {
        return Err(IngestError::EmptyManifest(name.display().to_string()));
    }
    Ok(out)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    read_manifest_from(File::open(path).map_err(|e| IngestError::File { file: path.display().to_string(), source: e })?, path)
}

pub fn write_manifest<W: Write>(entries: &[ManifestEntry], writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(MANIFEST_HEADER)?;
    for e in entries {
        wtr.write_record([&e.file.display().to_string(), &e.region, &e.feature, e.unit.as_str(), e.availability.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a `timestamp_utc,value` file; `nan` or an empty cell is missing.
pub fn read_region_series_from<R: Read>(reader: R, name: &Path, entry: &ManifestEntry) -> Result<RawSeries, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(name, 1, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != REGION_HEADER {
        return Err(parse_err(name, 1, format!("expected header {}", REGION_HEADER.join(","))));
    }
    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| parse_err(name, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        timestamps.push(parse_utc(&record[0]).ok_or_else(|| parse_err(name, line, format!("bad timestamp {:?}", &record[0])))?);
        values.push(parse_value(&record[1]).map_err(|m| parse_err(name, line, m))?);
    }
    Ok(RawSeries { region: entry.region.clone(), feature: entry.feature.clone(), unit: entry.unit, timestamps, values })
}

pub fn write_region_series<W: Write>(series: &RawSeries, writer: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(REGION_HEADER)?;
    for (t, v) in series.timestamps.iter().zip(&series.values) {
        wtr.write_record([format_utc(*t), format_value(*v)])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Loads every file named by the manifest at `path`.
pub fn load_manifest_series(path: &Path) -> Result<Vec<RawSeries>, IngestError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    read_manifest(path)?
        .iter()
        .map(|entry| {
            let file = dir.join(&entry.file);
            let handle = File::open(&file).map_err(|e| IngestError::File { file: file.display().to_string(), source: e })?;
            read_region_series_from(handle, &file, entry)
        })
        .collect()
}
