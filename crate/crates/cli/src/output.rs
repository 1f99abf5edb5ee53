use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Sole writer of one command's output directory.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
    started: Instant,
    newton_iters: usize,
    max_residual: f64,
    failures: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
            newton_iters: 0,
            max_residual: 0.0,
            failures: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.root.join(name), bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: format!("{:x}", Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn record_solver(&mut self, newton_iters: usize, max_residual: f64) {
        self.newton_iters += newton_iters;
        self.max_residual = self.max_residual.max(max_residual);
    }

    pub fn record_failure(&mut self, message: String) {
        self.failures.push(message);
    }

    /// Writes `manifest.json`; integration failures become exit code 3.
    pub fn finish(self, command: &str, cfg: &ExperimentConfig) -> Result<(), CliError> {
        let manifest = json!({
            "command": command,
            "config": cfg,
            "versions": {
                "stochastic-contact": stochastic_contact::VERSION,
                "stochastic-contact-cli": env!("CARGO_PKG_VERSION"),
            },
            "files": self.files,
            "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
            "solver": {
                "total_newton_iters": self.newton_iters,
                "max_residual": self.max_residual,
            },
            "integration_failed": !self.failures.is_empty(),
            "failures": self.failures,
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("json values serialize");
        text.push('\n');
        fs::write(self.root.join("manifest.json"), text)?;
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(CliError::Integration(self.failures.join("; ")))
        }
    }
}
