//! JSON result records. Field order is fixed by the struct layout, and
//! `config` is a JSON object with sorted keys, so two runs with the same
//! configuration and seed differ only in `timing_ms`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dks::DksResult;
use crate::error::{Error, Result};
use crate::solver::SparseEigenResult;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub task: String,
    pub config: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    pub support: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub shift_used: f64,
    pub timing_ms: f64,
    pub library_version: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::invalid(format!("cannot serialize: {e}")))
}

impl ResultRecord {
    /// One sparse eigenvector; `values` holds the entries on the support.
    pub fn eig<C: Serialize + ?Sized>(task: &str, config: &C, r: &SparseEigenResult, timing_ms: f64) -> Result<Self> {
        let support = r.x.support().as_slice().to_vec();
        let values: Vec<f64> = support.iter().map(|&i| r.x.values()[i]).collect();
        let mut extra = Map::new();
        extra.insert("values".into(), to_value(&values)?);
        Ok(ResultRecord {
            task: task.into(),
            config: to_value(config)?,
            objective: Some(r.objective),
            density: None,
            support,
            iterations: r.iterations,
            converged: r.converged,
            shift_used: r.shift_used,
            timing_ms,
            library_version: LIBRARY_VERSION.into(),
            extra,
        })
    }

    pub fn dks<C: Serialize + ?Sized>(task: &str, config: &C, r: &DksResult, max_iter: usize, timing_ms: f64) -> Result<Self> {
        let mut extra = Map::new();
        extra.insert("method".into(), to_value(&r.method)?);
        Ok(ResultRecord {
            task: task.into(),
            config: to_value(config)?,
            objective: None,
            density: Some(r.density),
            support: r.vertices.as_slice().to_vec(),
            iterations: r.iterations,
            converged: r.iterations < max_iter,
            shift_used: r.final_shift,
            timing_ms,
            library_version: LIBRARY_VERSION.into(),
            extra,
        })
    }
}

/// Several records from one run plus run-level fields (for example
/// `total_density` of a sequential DkS run).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub task: String,
    pub config: Value,
    pub records: Vec<ResultRecord>,
    #[serde(flatten)]
    pub summary: Map<String, Value>,
    pub timing_ms: f64,
    pub library_version: String,
}

impl BatchReport {
    pub fn new<C: Serialize + ?Sized>(task: &str, config: &C, records: Vec<ResultRecord>, timing_ms: f64) -> Result<Self> {
        Ok(BatchReport {
            task: task.into(),
            config: to_value(config)?,
            records,
            summary: Map::new(),
            timing_ms,
            library_version: LIBRARY_VERSION.into(),
        })
    }

    pub fn with<T: Serialize + ?Sized>(mut self, key: &str, value: &T) -> Result<Self> {
        self.summary.insert(key.into(), to_value(value)?);
        Ok(self)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_result_json<T: Serialize + ?Sized>(result: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(result)?).map_err(|e| Error::io(path, e))
}

pub fn to_json<T: Serialize + ?Sized>(result: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(result).map_err(|e| Error::invalid(format!("cannot serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}
