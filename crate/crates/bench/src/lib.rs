//! Workloads shared by the benchmarks.

use supcheck_core::annotations::{bind_lenient, Binding};
use supcheck_core::fixtures::{LOOPADD_FIXED_SUP, LOOPADD_OO, LOOPADD_PAPER_SUP};
use supcheck_core::interp::{encode_u64, Frame};
use supcheck_core::lang::Program;
use supcheck_core::maxpoly::{CompareConfig, MaxPoly};
use supcheck_core::parser::{parse_annotations, parse_maxpoly, parse_program};

pub fn loopadd() -> Program {
    parse_program(LOOPADD_OO, "loopadd.oo").expect("fixture parses")
}

pub fn loopadd_binding(corrected: bool) -> (Program, Binding) {
    let p = loopadd();
    let src = if corrected { LOOPADD_FIXED_SUP } else { LOOPADD_PAPER_SUP };
    let a = parse_annotations(src, "loopadd.sup").expect("fixture parses");
    let b = bind_lenient(&a, &p, &CompareConfig::default()).expect("fixture binds");
    (p, b)
}

/// Every attribute of main set to the numeral `n`.
pub fn store(p: &Program, n: u64) -> Frame {
    let v = encode_u64(n, &p.numerals);
    Frame::for_main(p, p.main.attributes.iter().map(|a| (a.clone(), v.clone())))
}

/// A product of three maxima, which normalizes to a max of up to eight
/// polynomials.
pub fn wide_maxpoly() -> MaxPoly {
    parse_maxpoly("max(x, y + 1) * max(y, 2*z) * max(x + z + 1, x*y) * (x + 1)").expect("parses")
}
