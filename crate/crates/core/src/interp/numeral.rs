//! Naturals as constructor terms.

use std::rc::Rc;

use num::{BigUint, One, ToPrimitive, Zero};
use thiserror::Error;

use super::value::ObjectValue;
use crate::lang::NumeralScheme;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a numeral")]
pub struct NotANumeral(pub String);

fn not_numeral(v: &ObjectValue) -> NotANumeral {
    NotANumeral(v.display_bounded(64))
}

pub fn numeral_decode(v: &ObjectValue, scheme: &NumeralScheme) -> Result<BigUint, NotANumeral> {
    match scheme {
        NumeralScheme::Unary { succ, zero } => {
            let mut n: u64 = 0;
            let mut cur = v;
            loop {
                match (cur.ctor(), cur.children()) {
                    (c, [inner]) if c == succ.as_str() => {
                        n += 1;
                        cur = inner;
                    }
                    (c, []) if c == zero.as_str() => return Ok(n.into()),
                    _ => return Err(not_numeral(v)),
                }
            }
        }
        NumeralScheme::Binary {
            digit0,
            digit1,
            end,
        } => {
            // Outermost digit is the least significant.
            let mut n = BigUint::zero();
            let mut bit = 0u64;
            let mut cur = v;
            loop {
                match (cur.ctor(), cur.children()) {
                    (c, [inner]) if c == digit0.as_str() || c == digit1.as_str() => {
                        if c == digit1.as_str() {
                            n.set_bit(bit, true);
                        }
                        bit += 1;
                        cur = inner;
                    }
                    (c, []) if c == end.as_str() => return Ok(n),
                    _ => return Err(not_numeral(v)),
                }
            }
        }
    }
}

/// Canonical numeral for `n`: no leading zero digits in binary.
pub fn numeral_encode(n: &BigUint, scheme: &NumeralScheme) -> ObjectValue {
    match scheme {
        NumeralScheme::Unary { succ, zero } => {
            let count = n.to_u64().expect("unary numeral too large to build");
            wrap_unary(ObjectValue::leaf(zero.as_str()), count, succ.as_str().into())
        }
        NumeralScheme::Binary {
            digit0,
            digit1,
            end,
        } => {
            let (d0, d1): (Rc<str>, Rc<str>) = (digit0.as_str().into(), digit1.as_str().into());
            let mut v = ObjectValue::leaf(end.as_str());
            for bit in (0..n.bits()).rev() {
                let d = if n.bit(bit) { d1.clone() } else { d0.clone() };
                v = ObjectValue::new(d, vec![v]);
            }
            v
        }
    }
}

pub fn encode_u64(n: u64, scheme: &NumeralScheme) -> ObjectValue {
    numeral_encode(&BigUint::from(n), scheme)
}

/// `succ^count(base)`.
pub fn wrap_unary(base: ObjectValue, count: u64, succ: Rc<str>) -> ObjectValue {
    let mut v = base;
    for _ in 0..count {
        v = ObjectValue::new(succ.clone(), vec![v]);
    }
    v
}

/// Size of the canonical numeral for `n`, without building it.
pub fn encoded_size(n: &BigUint, scheme: &NumeralScheme) -> Option<u64> {
    match scheme {
        NumeralScheme::Unary { .. } => n.to_u64(),
        NumeralScheme::Binary { .. } => Some(n.bits()),
    }
}

/// Classifies a guard value without decoding long unary chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardValue {
    Zero,
    One,
    Other,
    NotNumeral,
}

pub fn guard_value(v: &ObjectValue, scheme: &NumeralScheme) -> GuardValue {
    if let NumeralScheme::Unary { succ, zero } = scheme {
        let is_zero = |x: &ObjectValue| x.ctor() == zero.as_str() && x.arity() == 0;
        if is_zero(v) {
            return GuardValue::Zero;
        }
        if v.ctor() == succ.as_str() && v.arity() == 1 && is_zero(&v.children()[0]) {
            return GuardValue::One;
        }
    }
    match numeral_decode(v, scheme) {
        Ok(n) if n.is_zero() => GuardValue::Zero,
        Ok(n) if n.is_one() => GuardValue::One,
        Ok(_) => GuardValue::Other,
        Err(_) => GuardValue::NotNumeral,
    }
}
