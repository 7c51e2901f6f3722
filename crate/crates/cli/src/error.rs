use std::io::Write;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys or values; exit status 2.
    #[error("{0}")]
    Usage(String),

    /// Malformed input file.
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Compute(#[from] qkd_phase_bound::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Serialize)]
struct Record<'a> {
    kind: &'a str,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Compute(_) => "computation",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON record `{"error": {"kind": ..., "message": ...}}`.
    pub fn write_record(&self, out: &mut dyn Write) {
        let rec = serde_json::json!({ "error": Record { kind: self.kind(), message: self.to_string() } });
        let _ = writeln!(out, "{rec}");
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
