//! The JSON envelope every subcommand emits.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, contents: &str) -> Self {
        InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(contents.as_bytes())),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub inputs: Vec<InputDigest>,
    pub config: Value,
    /// Known mismatches between annotations and their source, declared in
    /// `.sup` files with `discrepancy "..."`.
    pub known_discrepancies: Vec<String>,
    pub status: String,
    pub exit_code: i32,
    pub payload: Value,
}

impl Envelope {
    pub fn new(subcommand: &'static str, config: Value) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            tool: "supcheck",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            inputs: Vec::new(),
            config,
            known_discrepancies: Vec::new(),
            status: "ok".into(),
            exit_code: 0,
            payload: Value::Null,
        }
    }

    pub fn finish(mut self, status: &str, exit_code: i32, payload: impl Serialize) -> Self {
        self.status = status.to_string();
        self.exit_code = exit_code;
        self.payload = serde_json::to_value(payload).expect("reports serialize");
        self
    }
}
