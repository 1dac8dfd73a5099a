//! Provenance sidecar written next to every `--out` file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mdslab_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// SHA-256 of the canonical config JSON, or of the normalized argument
    /// list when the run was started from flags.
    pub config_hash: String,
    pub tool_version: String,
    pub command: String,
    /// What the command is meant to demonstrate.
    pub claim: String,
    /// Not reproducible, which is why the record sits beside the result
    /// rather than inside it.
    pub wall_time_seconds: f64,
    pub result: String,
    pub result_sha256: String,
}

/// `<out>.run.json`.
pub fn record_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".run.json");
    PathBuf::from(name)
}

impl RunRecord {
    pub fn write(&self, out: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("record serializes") + "\n";
        std::fs::write(record_path(out), text).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn read(out: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(record_path(out)).map_err(|e| Error::Io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("run record: {e}")))
    }
}
