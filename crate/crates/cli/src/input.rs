//! Reading JSON inputs and the CLI error type.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};

use superlin::{scalar, Scalar};

/// Why a command could not produce a report.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input; exit status 2.
    Input(String),
    /// The library rejected the input; exit status 3.
    Module(superlin::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Module(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "{s}"),
            CliError::Module(e) => write!(f, "{e}"),
        }
    }
}

impl From<superlin::Error> for CliError {
    fn from(e: superlin::Error) -> CliError {
        CliError::Module(e)
    }
}

/// Parses `path` as JSON of type `T`, reporting line and column on failure.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}:{}:{}: malformed JSON: {e}", path.display(), e.line(), e.column())))
}

/// Serde adapter for a three-index array of scalar strings.
pub mod cube {
    use super::*;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Vec<Scalar>>>, D::Error> {
        let texts = Vec::<Vec<Vec<String>>>::deserialize(d)?;
        texts
            .iter()
            .map(|a| a.iter().map(|b| b.iter().map(|t| scalar::parse(t).map_err(serde::de::Error::custom)).collect()).collect())
            .collect()
    }
}
