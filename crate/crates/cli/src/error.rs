use serde::Serialize;
use thiserror::Error;

/// Everything the binary can fail with. Parse and domain failures exit
/// with code 2, I/O failures with code 3; each is also emitted as a
/// structured JSON object on standard output.
#[derive(Debug, Error, Serialize, PartialEq, Eq)]
#[serde(tag = "kind")]
pub enum CliError {
    #[error("unknown subcommand '{name}'")]
    UnknownSubcommand { name: String },
    #[error("bad value for {flag}: {message}")]
    BadFlag { flag: String, message: String },
    #[error("missing required flag {flag}")]
    MissingRequired { flag: String },
    #[error("{message}")]
    Domain { message: String },
    #[error("i/o failure on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn bad_flag(flag: &str, message: impl Into<String>) -> CliError {
        CliError::BadFlag {
            flag: flag.into(),
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> CliError {
        CliError::Domain {
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            _ => 2,
        }
    }
}
