//! Run manifests and atomic output writes.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputDigest {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to re-run a command and check its inputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    /// Working directory the relative paths in `args` refer to.
    pub cwd: PathBuf,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Map<String, Value>,
    pub parameters: Value,
    pub version: String,
    /// Seconds since the Unix epoch, or `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn timestamp() -> u64 {
    if let Some(epoch) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return epoch;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Collects what a command read, wrote and chose while it runs.
#[derive(Debug)]
pub struct Recorder {
    command: String,
    args: Vec<String>,
    inputs: Vec<InputDigest>,
    outputs: Vec<PathBuf>,
    seeds: Map<String, Value>,
    parameters: Value,
}

impl Recorder {
    pub fn new(command: &str, args: &[String]) -> Self {
        Recorder {
            command: command.to_string(),
            args: args.to_vec(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seeds: Map::new(),
            parameters: Value::Object(Map::new()),
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| CliError::input(path, e))?;
        self.inputs.push(InputDigest {
            role: role.to_string(),
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(name.to_string(), Value::from(seed));
    }

    pub fn parameters(&mut self, parameters: Value) {
        self.parameters = parameters;
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Writes `<primary>.manifest.json`.
    pub fn finish(self, primary: &Path) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            args: self.args,
            cwd: std::env::current_dir().map_err(|e| CliError::Input(format!("working directory: {e}")))?,
            inputs: self.inputs,
            outputs: self.outputs,
            seeds: self.seeds,
            parameters: self.parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_atomic(&manifest_path(primary), text.as_bytes())
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::input(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::input(path, e))?;
    tmp.persist(path).map_err(|e| CliError::input(path, e.error))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path, e))
}
