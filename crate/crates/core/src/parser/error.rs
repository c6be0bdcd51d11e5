use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum ParseErrorKind {
    Unexpected { found: String, expected: Vec<String> },
    /// Syntax outside the supported operations, e.g. `x - y` in a bound.
    UnknownConstruct(String),
    Invalid(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "found {found}, expected {}", expected.join(" or "))
            }
            ParseErrorKind::UnknownConstruct(construct) => {
                write!(f, "unsupported construct: {construct}")
            }
            ParseErrorKind::Invalid(message) => f.write_str(message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{origin}:{line}:{col}: {kind}")]
pub struct ParseError {
    pub origin: String,
    pub line: u32,
    pub col: u32,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(origin: &str, line: u32, col: u32, kind: ParseErrorKind) -> Self {
        ParseError {
            origin: origin.to_string(),
            line,
            col,
            kind,
        }
    }
}
