use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::CliError;

/// Files written by one run, in write order.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value).expect("serializable output");
        body.push('\n');
        self.text(name, &body)
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }
}

/// Provenance of one invocation; the only output that is allowed to differ between reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub workers: usize,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: Option<u64>, config: serde_json::Value, outputs: &Outputs, workers: usize, elapsed: Duration) -> Self {
        Self {
            subcommand: subcommand.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config,
            outputs: outputs.files().iter().map(|p| p.display().to_string()).collect(),
            workers,
            duration_seconds: elapsed.as_secs_f64(),
        }
    }
}
