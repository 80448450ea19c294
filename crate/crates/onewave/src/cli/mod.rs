//! Command-line front end: run configs, data synthesis, the three
//! reconstruction pipelines and reproduction of the worked examples.
//!
//! Every command writes into one output directory and finishes with a
//! `manifest.csv` listing each file with its SHA-256, inputs and parameters.

mod commands;
mod config;
pub mod render;

pub use commands::{cmd_coeffs, cmd_image, cmd_polygon, cmd_reproduce, cmd_synthesize, load_data, synthesize_run};
pub use config::{
    preset, AxisSpec, CoeffSpec, DataSpec, Disk, FamilySpec, GridSpec, ImageSpec, OutputSpec, Overrides, PipelineSpec,
    PolygonSpec, RunConfig, ScenarioSpec, SweepEntry, PRESETS,
};

use crate::factorization::FactorizationError;
use crate::forward::ForwardError;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Config error naming the offending field path.
    pub fn config(path: impl AsRef<str>, msg: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {msg}", path.as_ref()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ForwardError> for CliError {
    fn from(e: ForwardError) -> Self {
        match e {
            ForwardError::InvalidScenario(m) => CliError::Config(m),
            ForwardError::Io(m) => CliError::Io(m),
            ForwardError::Format(m) => CliError::Io(format!("malformed file: {m}")),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<FactorizationError> for CliError {
    fn from(e: FactorizationError) -> Self {
        match e {
            FactorizationError::Forward(f) => f.into(),
            FactorizationError::InvalidInput(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// One row of `manifest.csv`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
    pub inputs: String,
    pub parameters: String,
}

/// Output directory that records what it writes.
#[derive(Debug)]
pub struct Artifacts {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
    log: Vec<String>,
}

impl Artifacts {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Artifacts { root: root.into(), entries: Vec::new(), log: Vec::new() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.log.push(line.into());
    }

    /// Writes `bytes` at `rel` below the root and records it.
    pub fn write(&mut self, rel: impl AsRef<Path>, bytes: &[u8], inputs: &str, parameters: &str) -> Result<PathBuf> {
        let rel = rel.as_ref();
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, bytes)?;
        self.entries.push(ManifestEntry {
            file: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
            inputs: inputs.to_string(),
            parameters: parameters.to_string(),
        });
        Ok(path)
    }

    /// Records a file that a library routine already wrote below the root.
    pub fn record(&mut self, rel: impl AsRef<Path>, inputs: &str, parameters: &str) -> Result<Vec<u8>> {
        let rel = rel.as_ref();
        let bytes = std::fs::read(self.root.join(rel))?;
        self.entries.push(ManifestEntry {
            file: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len(),
            inputs: inputs.to_string(),
            parameters: parameters.to_string(),
        });
        Ok(bytes)
    }

    /// Writes `manifest.csv`, sorted by file name.
    pub fn finish(mut self) -> Result<(PathBuf, Vec<String>)> {
        self.entries.sort();
        let version = env!("CARGO_PKG_VERSION");
        let rows = self.entries.iter().map(|e| {
            vec![
                e.file.clone(),
                e.sha256.clone(),
                e.bytes.to_string(),
                e.inputs.clone(),
                e.parameters.clone(),
                format!("onewave {version}"),
            ]
        });
        let bytes = render::csv_bytes(&["file", "sha256", "bytes", "inputs", "parameters", "version"], rows);
        std::fs::create_dir_all(&self.root)?;
        let path = self.root.join("manifest.csv");
        std::fs::write(&path, bytes)?;
        Ok((path, self.log))
    }
}

/// Reads a config file or a `preset:NAME` reference.
pub fn load_config(spec: &str) -> Result<RunConfig> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return preset(name);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
    RunConfig::from_toml(&text)
}
