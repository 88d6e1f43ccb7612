//! JSON system-spec files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_system, ModelError, MultiSystem};

pub const FORMAT_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub version: i64,
    pub automata: Vec<RawAutomaton>,
    pub message_bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAutomaton {
    pub name: String,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub finals: Vec<String>,
    #[serde(default)]
    pub broadcasting: Vec<String>,
    pub delta: Vec<RawTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTransition {
    pub state: String,
    pub symbol: String,
    pub next: String,
    pub r#move: i64,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

pub fn parse_raw(text: &str) -> Result<RawSystem, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_system(text: &str) -> Result<MultiSystem, SpecError> {
    Ok(validate_system(&parse_raw(text)?)?)
}

pub fn load_system(path: impl AsRef<Path>) -> Result<MultiSystem, SpecError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_system(&text)
}

pub fn serialize_system(system: &MultiSystem) -> String {
    let mut out = serde_json::to_string_pretty(&system.to_raw()).expect("raw systems always serialize");
    out.push('\n');
    out
}
