//! Run manifests: configuration hash, artifact list, reports, telemetry.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliResult;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Telemetry {
    pub wall_ms: u128,
    /// Bytes of one field buffer at the configured grid.
    pub field_bytes: usize,
    /// Number of persisted artifacts.
    pub artifact_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub pipeline: String,
    pub config_hash: String,
    pub files: Vec<String>,
    pub reports: serde_json::Value,
    pub telemetry: Telemetry,
}

pub fn config_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }

    /// Every listed artifact must exist next to the manifest.
    pub fn check_artifacts(&self, dir: &Path) -> CliResult<()> {
        for f in &self.files {
            let p = dir.join(f);
            if !p.exists() {
                return Err(crate::CliError::Io(format!("missing artifact {}", p.display())));
            }
        }
        Ok(())
    }
}
