//! Append-only run manifest (`manifest.jsonl`), one line per run.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::output::{to_json, Format};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// `None` when the bundled default configuration was used.
    pub config: Option<String>,
    pub out: String,
    pub format: Format,
    pub version: String,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub files: Vec<String>,
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
    pub exit_code: i32,
}

pub fn append(dir: &Path, entry: &RunManifest) -> std::io::Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join(MANIFEST_FILE))?;
    f.write_all(&to_json(entry))
}
