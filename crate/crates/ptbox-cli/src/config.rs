//! Run configuration: a flat JSON document overlaid with command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::commands::Failure;

/// Every key a config file may hold. Unset keys fall back to per-command
/// defaults or fail validation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub ell1: Option<f64>,
    pub ell2: Option<f64>,
    pub n: Option<usize>,
    pub complex_region: Option<Vec<f64>>,
    pub profile_points: Option<usize>,
    pub gram: Option<usize>,
    pub c_terms: Option<usize>,
    pub seed: Option<u64>,
    pub coupling: Option<f64>,
    pub rho: Option<f64>,
    pub mu: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub delta: Option<f64>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub steps: Option<usize>,
    pub fit_min: Option<f64>,
    pub fit_max: Option<f64>,
    pub terms: Option<usize>,
    pub points: Option<usize>,
    pub method: Option<String>,
    pub witness: Option<bool>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

const SHARED: &[&str] = &["out", "jobs"];

fn allowed(command: &str) -> &'static [&'static str] {
    match command {
        "spectrum" => &["L", "ell1", "ell2", "n", "complex_region", "profile_points"],
        "inner" => &["L", "ell1", "ell2", "gram", "c_terms"],
        "variational" => &["n", "seed", "coupling"],
        "scatter" => &["rho", "mu", "theta", "phi", "delta", "k_min", "k_max", "steps", "fit_min", "fit_max"],
        "kernel" => &["L", "ell2", "terms", "points", "method", "witness"],
        _ => &[],
    }
}

/// Reads `path` as a flat JSON object.
pub fn read_file(path: &Path) -> Result<Map<String, Value>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Failure::Config(format!("config {} is not a JSON object", path.display()))),
        Err(e) => Err(Failure::Config(format!("config {}: {e}", path.display()))),
    }
}

/// Overlays `flags` on `file`, checks the keys against `command` and
/// deserializes the result.
pub fn merge(command: &str, mut file: Map<String, Value>, flags: Map<String, Value>) -> Result<RunConfig, Failure> {
    if let Some(v) = file.remove("command") {
        if v.as_str() != Some(command) {
            return Err(Failure::Config(format!("config is for command {v}, not {command}")));
        }
    }
    file.extend(flags);
    let permitted = allowed(command);
    for key in file.keys() {
        if !SHARED.contains(&key.as_str()) && !permitted.contains(&key.as_str()) {
            return Err(Failure::Config(format!("{command}: unexpected key {key:?}")));
        }
    }
    serde_json::from_value(Value::Object(file)).map_err(|e| Failure::Config(format!("{command}: {e}")))
}

/// Flag values to overlay; unset flags are skipped.
#[derive(Default)]
pub struct Overrides(pub Map<String, Value>);

impl Overrides {
    pub fn set<T: Into<Value>>(&mut self, key: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_owned(), v.into());
        }
        self
    }
}

/// A required key, or a config failure naming it.
pub fn require<T: Copy>(command: &str, key: &str, value: Option<T>) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Config(format!("{command}: missing required key {key}")))
}
