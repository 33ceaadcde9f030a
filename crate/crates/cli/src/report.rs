//! Run report and output bookkeeping.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    /// Wall-clock seconds per stage; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub outputs: Vec<OutputEntry>,
    pub summary: serde_json::Value,
}

/// Collects outputs, warnings and timings for one command.
pub struct Run {
    dir: PathBuf,
    report: RunReport,
}

impl Run {
    pub fn new(command: &str, dir: &Path, config_json: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            report: RunReport {
                command: command.to_string(),
                config_hash: sha256_hex(config_json.as_bytes()),
                timings: BTreeMap::new(),
                warnings: Vec::new(),
                outputs: Vec::new(),
                summary: serde_json::Value::Null,
            },
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Logs a numerical event and records it in the report.
    pub fn warn(&mut self, message: String) {
        log::warn!("{message}");
        self.report.warnings.push(message);
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.report.timings.entry(stage.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        out
    }

    /// Writes `bytes` to `name` under the output directory and lists it.
    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Output(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.record(name, bytes);
        Ok(())
    }

    /// Lists a file that already exists with the given contents.
    pub fn record(&mut self, name: &str, bytes: &[u8]) {
        let entry = OutputEntry { path: name.to_string(), bytes: bytes.len(), sha256: sha256_hex(bytes) };
        match self.report.outputs.iter_mut().find(|e| e.path == name) {
            Some(existing) => *existing = entry,
            None => self.report.outputs.push(entry),
        }
    }

    pub fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
        bytes.push(b'\n');
        self.emit(name, &bytes)
    }

    pub fn emit_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Output(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        self.emit(name, &bytes)
    }

    pub fn set_summary(&mut self, summary: serde_json::Value) {
        self.report.summary = summary;
    }

    /// Writes `report.json` and returns the report.
    pub fn finish(self) -> Result<RunReport, CliError> {
        let path = self.dir.join("report.json");
        let mut bytes = serde_json::to_vec_pretty(&self.report).map_err(|e| CliError::Output(e.to_string()))?;
        bytes.push(b'\n');
        std::fs::write(&path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        Ok(self.report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn outputs_are_listed_once() {
        let dir = std::env::temp_dir().join(format!("strata-lgt-report-{}", std::process::id()));
        let mut run = Run::new("test", &dir, "{}").unwrap();
        run.emit("a.txt", b"one").unwrap();
        run.emit("a.txt", b"two").unwrap();
        run.emit("sub/b.txt", b"three").unwrap();
        let report = run.finish().unwrap();
        assert_eq!(report.outputs.len(), 2);
        assert_eq!(report.outputs[0].sha256, sha256_hex(b"two"));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
