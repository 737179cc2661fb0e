//! Line/2-plane configurations: seeded generators and the on-disk format.

mod generate;
mod io;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Flat2, GeometryError, Line4};

pub use generate::{gen_generic, gen_planted, gen_star, GeneratorSpec, PlantedTruth, DEFAULT_RANGE};
pub use io::{load_config, parse_config, save_config, to_json};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("coordinate range {0} is too small to draw distinct objects")]
    RangeTooSmall(i64),
    #[error("rejection budget exceeded while generating {0}")]
    RejectionBudgetExceeded(&'static str),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which generator produced a configuration and with what parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(generator: &str, params: &[(&str, String)]) -> Self {
        Self {
            generator: generator.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

/// The L lines and S 2-planes of one experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigurationSet {
    lines: Vec<Line4>,
    planes: Vec<Flat2>,
    pub seed: Option<u64>,
    pub provenance: Provenance,
}

impl ConfigurationSet {
    /// Rejects duplicate lines or planes (compared by canonical form).
    pub fn new(
        lines: Vec<Line4>,
        planes: Vec<Flat2>,
        seed: Option<u64>,
        provenance: Provenance,
    ) -> Result<Self, ConfigError> {
        let mut seen = HashSet::new();
        for (i, l) in lines.iter().enumerate() {
            if !seen.insert(l.canonical()) {
                return Err(ConfigError::InvariantViolation(format!("line {i} duplicates an earlier line")));
            }
        }
        let mut seen = HashSet::new();
        for (j, p) in planes.iter().enumerate() {
            if !seen.insert(p.canonical()) {
                return Err(ConfigError::InvariantViolation(format!("plane {j} duplicates an earlier plane")));
            }
        }
        Ok(Self { lines, planes, seed, provenance })
    }

    pub fn lines(&self) -> &[Line4] {
        &self.lines
    }

    pub fn planes(&self) -> &[Flat2] {
        &self.planes
    }

    /// L
    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    /// S
    pub fn num_planes(&self) -> usize {
        self.planes.len()
    }

    /// Same objects, reordered: `line_order[i]` is the old index of new line `i`.
    pub fn permuted(&self, line_order: &[usize], plane_order: &[usize]) -> Self {
        Self {
            lines: line_order.iter().map(|&i| self.lines[i].clone()).collect(),
            planes: plane_order.iter().map(|&j| self.planes[j].clone()).collect(),
            seed: self.seed,
            provenance: self.provenance.clone(),
        }
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(to_json(self).as_bytes()))
    }
}

impl From<GeometryError> for ConfigError {
    fn from(e: GeometryError) -> Self {
        ConfigError::InvariantViolation(e.to_string())
    }
}

/// Planted ground truth alongside the configuration it was planted in.
#[derive(Clone, Debug)]
pub struct Generated {
    pub config: ConfigurationSet,
    pub truth: PlantedTruth,
}
