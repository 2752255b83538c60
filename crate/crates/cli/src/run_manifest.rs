//! `run_manifest.json`: what produced the files in an output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::failure::{CliResult, Failure, IO};

pub const FILE_NAME: &str = "run_manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    /// Input path to hex SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// A seed for commands run without `--seed`; recorded in the manifest.
pub fn draw_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| Failure::new(IO, format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &'static str, config: Value, seed: Option<u64>, started_unix: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs: BTreeMap::new(),
            seed,
            started_unix,
            finished_unix: started_unix,
        }
    }

    pub fn hash_input(&mut self, path: &Path) -> CliResult {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    /// Writes the manifest into `dir`, replacing any earlier one.
    pub fn write(mut self, dir: &Path) -> CliResult {
        self.finished_unix = unix_now();
        fs::create_dir_all(dir).map_err(|e| Failure::new(IO, format!("{}: {e}", dir.display())))?;
        let path = dir.join(FILE_NAME);
        let mut text = serde_json::to_string_pretty(&self).map_err(|e| Failure::new(IO, e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Failure::new(IO, format!("{}: {e}", path.display())))
    }
}

/// Directory that receives the manifest for an output file path.
pub fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}
