//! Run manifest: enough metadata to regenerate every file of an output
//! directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

use radial_core::growth::RNG_ID;

/// Bumped whenever a file name or CSV column changes.
pub const LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub layout_version: u32,
    pub command: String,
    pub rng: &'static str,
    pub master_seed: Option<u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Full `key=value` config as applied, including defaults.
    pub config: String,
    pub inputs: Vec<String>,
    /// Paths relative to the output directory, in write order.
    pub files: Vec<String>,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Collects written files under one output root.
pub struct Output {
    root: PathBuf,
    manifest: Manifest,
}

impl Output {
    pub fn create(
        root: &Path,
        command: &str,
        master_seed: Option<u64>,
        config: String,
    ) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest: Manifest {
                tool: env!("CARGO_PKG_NAME"),
                tool_version: env!("CARGO_PKG_VERSION"),
                layout_version: LAYOUT_VERSION,
                command: command.to_owned(),
                rng: RNG_ID,
                master_seed,
                started_unix: now(),
                finished_unix: 0,
                config,
                inputs: Vec::new(),
                files: Vec::new(),
            },
        })
    }

    pub fn add_input(&mut self, path: &Path) {
        self.manifest.inputs.push(path.display().to_string());
    }

    /// Writes `rel` under the root with the bytes produced by `fill`.
    pub fn write<F>(&mut self, rel: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> radial_core::Result<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.files.push(rel.to_owned());
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.finished_unix = now();
        let path = self.root.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(self.root)
    }
}
