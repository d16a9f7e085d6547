//! Dataset manifest (CSV of image paths with labels) and the feature-table
//! CSV emitted by extraction and consumed by selection/evaluation.

use crate::classify::{Label, LabeledSample};
use crate::features::{FeatureVector, FEATURE_NAMES};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

/// Required manifest header, verbatim.
pub const MANIFEST_HEADER: [&str; 4] = ["path", "label", "sensor", "material"];

/// One manifest row: an image to process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRecord {
    /// Path exactly as written in the manifest; resolve relative paths
    /// against the manifest's directory with [`ManifestRecord::resolve`].
    pub path: PathBuf,
    pub label: Label,
    pub sensor: String,
    pub material: Option<String>,
}

impl ManifestRecord {
    /// Joins a relative path onto `base` (absolute paths pass through).
    pub fn resolve(&self, base: &Path) -> PathBuf {
        if self.path.is_absolute() {
            self.path.clone()
        } else {
            base.join(&self.path)
        }
    }

    /// Sample identifier: the file stem, falling back to the whole path.
    pub fn id(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.to_string_lossy().into_owned())
    }
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("bad header: expected 'path,label,sensor,material', got '{0}'")]
    BadHeader(String),
    #[error("row {row}: unknown label '{label}' (expected 'real' or 'fake')")]
    BadLabel { row: usize, label: String },
    #[error("duplicate path '{0}'")]
    DuplicatePath(String),
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("could not read '{path}': {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Parses manifest CSV text. Header must match [`MANIFEST_HEADER`]; rows
/// keep file order; an empty material field becomes `None`.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRecord>, ManifestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ManifestError::BadHeader(e.to_string()))?
        .clone();
    let header_fields: Vec<&str> = headers.iter().collect();
    if header_fields != MANIFEST_HEADER {
        return Err(ManifestError::BadHeader(header_fields.join(",")));
    }
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 2; // header is line 1
        let row = row.map_err(|e| ManifestError::MalformedRow {
            row: row_no,
            message: e.to_string(),
        })?;
        if row.len() != 4 {
            return Err(ManifestError::MalformedRow {
                row: row_no,
                message: format!("expected 4 fields, got {}", row.len()),
            });
        }
        let path = &row[0];
        if path.is_empty() {
            return Err(ManifestError::MalformedRow {
                row: row_no,
                message: "empty path".into(),
            });
        }
        if !seen.insert(path.to_string()) {
            return Err(ManifestError::DuplicatePath(path.to_string()));
        }
        let label = Label::from_str(&row[1]).map_err(|_| ManifestError::BadLabel {
            row: row_no,
            label: row[1].to_string(),
        })?;
        let sensor = row[2].to_string();
        if sensor.is_empty() {
            return Err(ManifestError::MalformedRow {
                row: row_no,
                message: "empty sensor".into(),
            });
        }
        let material = if row[3].is_empty() {
            None
        } else {
            Some(row[3].to_string())
        };
        records.push(ManifestRecord {
            path: PathBuf::from(path),
            label,
            sensor,
            material,
        });
    }
    Ok(records)
}

/// Reads and parses a manifest file.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestRecord>, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(&text)
}

/// Feature-table header: identity columns plus the ten features in
/// canonical order (13 columns total).
pub fn feature_csv_header() -> Vec<String> {
    let mut h = vec![
        "sample_id".to_string(),
        "sensor".to_string(),
        "label".to_string(),
    ];
    h.extend(FEATURE_NAMES.iter().map(|n| n.to_lowercase()));
    h
}

/// Writes the feature table with fixed 6-decimal formatting so repeated
/// runs are byte-identical.
pub fn write_features_csv<W: std::io::Write>(
    writer: W,
    rows: &[LabeledSample],
) -> Result<(), ManifestError> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| ManifestError::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(feature_csv_header()).map_err(io_err)?;
    for s in rows {
        let mut record = vec![s.id.clone(), s.sensor.clone(), s.label.to_string()];
        record.extend(s.features.as_array().iter().map(|v| format!("{v:.6}")));
        w.write_record(&record).map_err(io_err)?;
    }
    w.flush().map_err(|e| ManifestError::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

/// Reads a feature table produced by [`write_features_csv`]. Material is
/// not part of the table (it never affects computation), so samples come
/// back with `material = None`.
pub fn read_features_csv(text: &str) -> Result<Vec<LabeledSample>, ManifestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ManifestError::BadHeader(e.to_string()))?
        .clone();
    let expect = feature_csv_header();
    let got: Vec<&str> = headers.iter().collect();
    if got != expect.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(ManifestError::BadHeader(got.join(",")));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 2;
        let row = row.map_err(|e| ManifestError::MalformedRow {
            row: row_no,
            message: e.to_string(),
        })?;
        if row.len() != 13 {
            return Err(ManifestError::MalformedRow {
                row: row_no,
                message: format!("expected 13 fields, got {}", row.len()),
            });
        }
        let label = Label::from_str(&row[2]).map_err(|_| ManifestError::BadLabel {
            row: row_no,
            label: row[2].to_string(),
        })?;
        let mut values = [0.0f64; 10];
        for (k, v) in values.iter_mut().enumerate() {
            *v = row[3 + k]
                .parse::<f64>()
                .map_err(|e| ManifestError::MalformedRow {
                    row: row_no,
                    message: format!("column {}: {e}", 3 + k),
                })?;
        }
        out.push(LabeledSample {
            id: row[0].to_string(),
            sensor: row[1].to_string(),
            label,
            material: None,
            features: FeatureVector::from_array(values),
        });
    }
    Ok(out)
}
