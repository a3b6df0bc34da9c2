use std::fs;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::Format;

pub const SCHEMA: &str = "ttforge-report/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        1
    }
}

impl From<ttforge::io::IoError> for CliError {
    fn from(e: ttforge::io::IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Schema-versioned envelope around a command's result.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, input: Option<&[u8]>, passed: bool, result: Value) -> Report {
        Report {
            schema: SCHEMA,
            tool: "ttforge",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            input_sha256: input.map(sha256_hex),
            seed: None,
            passed,
            result,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Report {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What a command prints and how the process exits.
pub struct Outcome {
    /// Absent for commands whose only output is `text`.
    pub report: Option<Report>,
    pub text: String,
    pub format: Format,
}

impl Outcome {
    pub fn finish(self) -> ExitCode {
        match (&self.report, self.format) {
            (Some(r), Format::Json) => print!("{}", r.to_json()),
            _ => print!("{}", self.text),
        }
        let passed = self.report.as_ref().is_none_or(|r| r.passed);
        ExitCode::from(if passed { 0 } else { 2 })
    }
}

pub fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}
