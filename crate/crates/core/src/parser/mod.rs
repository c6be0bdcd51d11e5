//! Concrete syntax: programs (`.oo`), annotations (`.sup`) and ground terms.

pub mod annotations;
pub mod error;
mod lexer;
pub mod printer;
pub mod program;
pub mod term;

pub use annotations::{parse_annotations, parse_maxpoly, AnnotationSet, SupEntry, WeightEntry};
pub use error::{ParseError, ParseErrorKind};
pub use printer::{pretty_print, print_expr};
pub use program::{parse_expression, parse_program};
pub use term::{parse_term, Term};
