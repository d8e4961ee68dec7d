//! `manifest.json`: what ran, on which inputs, and what it wrote.

use crate::gridio::GridFileError;
use crate::report::write_json;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self, GridFileError> {
        let data = fs::read(path).map_err(|source| GridFileError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&data)),
            bytes: data.len() as u64,
        })
    }
}

/// Digest of every file under a directory input (sorted), or of the file itself.
pub fn digest_input(path: &Path) -> Result<Vec<FileDigest>, GridFileError> {
    if !path.is_dir() {
        return Ok(vec![FileDigest::of(path)?]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .and_then(|it| it.map(|e| e.map(|e| e.path())).collect())
        .map_err(|source| GridFileError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    files.retain(|p| p.is_file());
    files.sort();
    files.iter().map(|p| FileDigest::of(p)).collect()
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub threads: usize,
    pub duration_seconds: f64,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            threads: rayon::current_num_threads(),
            duration_seconds: 0.0,
            notes: Vec::new(),
        }
    }

    /// Digests `outputs` (paths recorded relative to `out_dir`) and writes the manifest.
    pub fn finish(
        mut self,
        out_dir: &Path,
        outputs: &[PathBuf],
        elapsed: Duration,
    ) -> Result<PathBuf, GridFileError> {
        self.outputs = outputs
            .iter()
            .map(|p| {
                let mut d = FileDigest::of(p)?;
                if let Ok(rel) = p.strip_prefix(out_dir) {
                    d.path = rel.display().to_string();
                }
                Ok(d)
            })
            .collect::<Result<_, GridFileError>>()?;
        self.duration_seconds = elapsed.as_secs_f64();
        let path = out_dir.join(MANIFEST_FILE);
        write_json(&path, &self)?;
        Ok(path)
    }
}
