//! Reference interpreter for the call-by-value semantics.

pub mod exec;
pub mod numeral;
pub mod trace;
pub mod value;

pub use exec::{eval_expr, exec_cmd, execute, invoke, run_main, ExecConfig, Frame, Run, RuntimeFault};
pub use numeral::{encode_u64, guard_value, numeral_decode, numeral_encode, GuardValue, NotANumeral};
pub use trace::{Branch, EventKind, LoopMark, Trace, TraceEvent};
pub use value::{size, ObjectValue};

use crate::lang::Program;
use crate::parser::Term;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{ctor}` takes {expected} arguments, got {found}")]
    Arity {
        ctor: String,
        expected: usize,
        found: usize,
    },
    #[error("numeral {0} is too large to build")]
    TooLarge(String),
}

/// Largest unary numeral accepted from a term.
pub const MAX_TERM_NUMERAL: u64 = 10_000_000;

/// Builds a ground value from term syntax, checking constructor arities
/// against `p`. Decimal numerals use the program's numeral scheme.
pub fn value_of_term(t: &Term, p: &Program) -> Result<ObjectValue, TermError> {
    match t {
        Term::Numeral(n) => {
            if let Some(s) = numeral::encoded_size(n, &p.numerals) {
                if s <= MAX_TERM_NUMERAL {
                    return Ok(numeral_encode(n, &p.numerals));
                }
            }
            Err(TermError::TooLarge(n.to_string()))
        }
        Term::Ctor(c, args) => {
            let expected = p
                .class_arity(c)
                .ok_or_else(|| TermError::UnknownConstructor(c.clone()))?;
            if expected != args.len() {
                return Err(TermError::Arity {
                    ctor: c.clone(),
                    expected,
                    found: args.len(),
                });
            }
            let kids = args
                .iter()
                .map(|a| value_of_term(a, p))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ObjectValue::new(c.as_str().into(), kids))
        }
    }
}
