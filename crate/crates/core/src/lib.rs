//! Sup-interpretation toolchain for a small object-oriented language.
//!
//! Programs are parsed ([`parser`]), checked and classified ([`lang`]),
//! executed ([`interp`]) and analysed against user-supplied
//! sup-interpretations and weights ([`annotations`], [`criterion`]).
//! [`validator`] tests the resulting size bounds on concrete runs.

pub mod annotations;
pub mod criterion;
pub mod fixtures;
pub mod interp;
pub mod lang;
pub mod maxpoly;
pub mod parser;
pub mod validator;

pub use lang::*;
pub use maxpoly::{compare_geq, normalize, CompareConfig, CompareVerdict, MaxPoly, NormalForm};
pub use parser::{parse_annotations, parse_program, pretty_print, AnnotationSet, ParseError};
pub use annotations::{bind, bind_lenient, partial_assignment, AssignmentMap, Binding, WeightMap};
pub use criterion::{check_brotherly, generate_obligations, BrotherlyReport, Obligation, Overall};
pub use interp::{execute, ExecConfig, Frame, ObjectValue, RuntimeFault, Trace};
pub use validator::{monitor_growth, validate, GrowthReport, GrowthVerdict, ValidateConfig, ValidationReport};
