use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_SCHEMA: u32 = 1;
pub const NORMS_CSV_SCHEMA: &str = "norms-csv/1";
pub const TABLE_CSV_SCHEMA: &str = "table-csv/1";
pub const REPORT_JSON_SCHEMA: &str = "study-report/1";
pub const NOISE_RECORD_SCHEMA: &str = "noise-record/1";
pub const FIELD_RECORD_SCHEMA: &str = "field-record/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub format: String,
    pub sha256: String,
}

/// Provenance of one command invocation. Wall-clock time lives here and
/// nowhere else, so data outputs stay byte-identical across reruns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub manifest_schema: u32,
    pub command: String,
    pub config_path: Option<String>,
    /// sha256 of the config file bytes.
    pub config_hash: Option<String>,
    pub base_seed: u64,
    pub sample_count: Option<usize>,
    pub grid: Option<usize>,
    pub lattice: Option<usize>,
    pub epsilon: Vec<f64>,
    pub jobs: Option<usize>,
    pub wall_clock_seconds: f64,
    pub outputs: BTreeMap<String, OutputEntry>,
    pub status: String,
    pub blowup_time: Option<f64>,
    pub message: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, base_seed: u64) -> Self {
        RunManifest {
            tool: TOOL.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            manifest_schema: MANIFEST_SCHEMA,
            command: command.to_string(),
            config_path: None,
            config_hash: None,
            base_seed,
            sample_count: None,
            grid: None,
            lattice: None,
            epsilon: Vec::new(),
            jobs: None,
            wall_clock_seconds: 0.0,
            outputs: BTreeMap::new(),
            status: "ok".to_string(),
            blowup_time: None,
            message: None,
        }
    }

    pub fn with_config(mut self, path: &Path, bytes: &[u8]) -> Self {
        self.config_path = Some(path.display().to_string());
        self.config_hash = Some(sha256_hex(bytes));
        self
    }

    /// Writes `bytes` atomically to `dir/name` and records the artifact.
    pub fn emit(&mut self, dir: &Path, name: &str, format: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&dir.join(name), bytes)?;
        self.outputs.insert(
            name.to_string(),
            OutputEntry {
                path: name.to_string(),
                format: format.to_string(),
                sha256: sha256_hex(bytes),
            },
        );
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}
