use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConfigError, ConfigurationSet, Provenance};
use crate::exact::{rational_serde, Vec4};
use crate::geometry::{Flat2, Line4};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    #[serde(with = "rational_serde::array")]
    p: Vec4,
    #[serde(with = "rational_serde::array")]
    d: Vec4,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneRecord {
    #[serde(with = "rational_serde::array")]
    q: Vec4,
    #[serde(with = "rational_serde::array")]
    u: Vec4,
    #[serde(with = "rational_serde::array")]
    v: Vec4,
}

#[derive(Serialize, Deserialize)]
struct FileRecord {
    lines: Vec<LineRecord>,
    planes: Vec<PlaneRecord>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    provenance: Provenance,
}

/// Canonical JSON text of a configuration. Identical configurations give
/// byte-identical text.
pub fn to_json(cfg: &ConfigurationSet) -> String {
    let record = FileRecord {
        lines: cfg.lines().iter().map(|l| LineRecord { p: l.base().clone(), d: l.direction().clone() }).collect(),
        planes: cfg
            .planes()
            .iter()
            .map(|f| PlaneRecord { q: f.base().clone(), u: f.u().clone(), v: f.v().clone() })
            .collect(),
        seed: cfg.seed,
        provenance: cfg.provenance.clone(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("configuration serializes");
    text.push('\n');
    text
}

pub fn parse_config(text: &str) -> Result<ConfigurationSet, ConfigError> {
    let record: FileRecord = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut lines = Vec::with_capacity(record.lines.len());
    for (i, r) in record.lines.into_iter().enumerate() {
        let line = Line4::new(r.p, r.d).map_err(|e| ConfigError::InvariantViolation(format!("line {i}: {e}")))?;
        lines.push(line);
    }
    let mut planes = Vec::with_capacity(record.planes.len());
    for (j, r) in record.planes.into_iter().enumerate() {
        let plane =
            Flat2::new(r.q, r.u, r.v).map_err(|e| ConfigError::InvariantViolation(format!("plane {j}: {e}")))?;
        planes.push(plane);
    }
    ConfigurationSet::new(lines, planes, record.seed, record.provenance)
}

pub fn save_config(cfg: &ConfigurationSet, path: impl AsRef<Path>) -> Result<(), ConfigError> {
    std::fs::write(path, to_json(cfg))?;
    Ok(())
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ConfigurationSet, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}
