//! The object language: syntax tree, well-formedness, call precedence,
//! flattening and command classification.

pub mod ast;
pub mod classify;
pub mod flatten;
pub mod precedence;
pub mod wellformed;

pub use ast::*;
pub use classify::{classify, classify_command, Classification, Flags};
pub use flatten::{flatten, FlattenError};
pub use precedence::{precedence, Precedence, UnknownSymbol};
pub use wellformed::{well_formed, Diagnostic, Diagnostics, Location, Rule, Severity};
