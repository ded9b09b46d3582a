//! Configuration, orchestration and CSV output for the `photon-echo` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use photon_echo::EchoError;
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Echo(#[from] EchoError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for configuration and usage problems, 3 for numerical failures,
    /// 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Echo(EchoError::Config(_)) => 2,
            CliError::Echo(_) => 3,
            CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Echo(EchoError::config("x")).exit_code(), 2);
        assert_eq!(CliError::Echo(EchoError::domain("x")).exit_code(), 3);
        let repeat = EchoError::Repeat { repeat: 3, source: Box::new(EchoError::Singularity { time: 1.0, value: 1.5 }) };
        assert_eq!(CliError::Echo(repeat).exit_code(), 3);
    }
}
