//! CSV tables, JSON summaries and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Max, mean and quantiles of a sample, or `None` for an empty sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub max: f64,
    pub argmax: usize,
    pub mean: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

impl Stats {
    /// Ignores non-finite entries in the quantiles but not in the maximum.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let (argmax, max) = values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        sorted.sort_by(f64::total_cmp);
        let quantile = |q: f64| {
            if sorted.is_empty() {
                f64::NAN
            } else {
                sorted[((sorted.len() - 1) as f64 * q).round() as usize]
            }
        };
        Some(Self {
            count: values.len(),
            max,
            argmax,
            mean: sorted.iter().sum::<f64>() / sorted.len().max(1) as f64,
            q50: quantile(0.5),
            q90: quantile(0.9),
            q99: quantile(0.99),
        })
    }
}

/// Serializes rows with a header, even when there are no rows.
pub fn csv_bytes<R: Serialize>(header: &[&str], rows: &[R]) -> CliResult<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.serialize(row).map_err(fail)?;
    }
    writer.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))
}

pub fn json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("summaries always serialize") + "\n"
}

/// Destination for a command's files; `None` prints the summary only.
#[derive(Debug, Clone)]
pub struct OutDir(pub Option<PathBuf>);

impl OutDir {
    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<Option<PathBuf>> {
        let Some(dir) = &self.0 else {
            return Ok(None);
        };
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(Some(path))
    }
}

/// Everything needed to repeat a run: the arguments it was given and the
/// files it read and wrote.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub artifact_version: String,
    pub wall_time_ms: u128,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}
