pub mod counterexample;
pub mod fuzz;
pub mod norms;
pub mod verify;

use std::path::PathBuf;

use serde::Serialize;

use crate::error::Status;

/// What a command produced, before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub summary: serde_json::Value,
    /// File name and contents, written under `--out`.
    pub files: Vec<(String, Vec<u8>)>,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub inputs: Vec<PathBuf>,
}

pub(crate) fn to_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("command summaries always serialize")
}
