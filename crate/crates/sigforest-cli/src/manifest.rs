//! Run manifests: every command records its resolved configuration, seed,
//! timestamps, output paths and artifact hashes. The manifest is written
//! before any result file and finalized (hashes, end timestamp) afterwards.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::CliError;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub started_at_epoch_s: u64,
    pub finished_at_epoch_s: Option<u64>,
    pub outputs: Vec<String>,
    pub artifact_sha256: BTreeMap<String, String>,
}

pub struct ManifestWriter {
    manifest: RunManifest,
    path: PathBuf,
}

fn now_epoch_s() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl ManifestWriter {
    /// Write the initial manifest (no hashes yet) next to the outputs.
    pub fn start(
        path: PathBuf,
        command: &str,
        config: serde_json::Value,
        seed: u64,
        outputs: &[&Path],
    ) -> Result<ManifestWriter, CliError> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            seed,
            started_at_epoch_s: now_epoch_s(),
            finished_at_epoch_s: None,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            artifact_sha256: BTreeMap::new(),
        };
        let writer = ManifestWriter { manifest, path };
        writer.write()?;
        Ok(writer)
    }

    /// Hash the produced artifacts and rewrite the manifest.
    pub fn finish(mut self) -> Result<(), CliError> {
        self.manifest.finished_at_epoch_s = Some(now_epoch_s());
        for output in self.manifest.outputs.clone() {
            let bytes = std::fs::read(&output).map_err(CliError::data)?;
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            self.manifest
                .artifact_sha256
                .insert(output, format!("{:x}", hasher.finalize()));
        }
        self.write()
    }

    fn write(&self) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&self.manifest).map_err(CliError::data)?;
        text.push('\n');
        std::fs::write(&self.path, text).map_err(CliError::data)?;
        Ok(())
    }
}
