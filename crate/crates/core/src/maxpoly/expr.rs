use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};

use num::{BigRational, One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Exact nonnegative rational.
pub type Rational = BigRational;

/// A point of `(ℝ⁺)^k` with rational coordinates.
pub type Point = BTreeMap<String, Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn point<'a>(coords: impl IntoIterator<Item = (&'a str, Rational)>) -> Point {
    coords.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no value for variable `{0}`")]
pub struct MissingVariable(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("negative constant {0} is outside Max-Poly")]
pub struct NegativeConstant(pub String);

/// A function of Max-Poly{ℝ⁺}: built from nonnegative constants,
/// variables, `+`, `×` and `max`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaxPoly {
    Const(Rational),
    Var(String),
    Sum(Vec<MaxPoly>),
    Product(Vec<MaxPoly>),
    Max(Vec<MaxPoly>),
}

impl MaxPoly {
    pub fn constant(c: Rational) -> Result<Self, NegativeConstant> {
        if c.is_negative() {
            Err(NegativeConstant(c.to_string()))
        } else {
            Ok(MaxPoly::Const(c))
        }
    }

    pub fn int(n: u64) -> Self {
        MaxPoly::Const(Rational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        MaxPoly::int(0)
    }

    pub fn one() -> Self {
        MaxPoly::int(1)
    }

    pub fn var(name: impl Into<String>) -> Self {
        MaxPoly::Var(name.into())
    }

    pub fn sum(items: impl IntoIterator<Item = MaxPoly>) -> Self {
        Self::nary(items, |x| matches!(x, MaxPoly::Sum(_)), MaxPoly::Sum, MaxPoly::zero())
    }

    pub fn product(items: impl IntoIterator<Item = MaxPoly>) -> Self {
        Self::nary(items, |x| matches!(x, MaxPoly::Product(_)), MaxPoly::Product, MaxPoly::one())
    }

    pub fn max(items: impl IntoIterator<Item = MaxPoly>) -> Self {
        Self::nary(items, |x| matches!(x, MaxPoly::Max(_)), MaxPoly::Max, MaxPoly::zero())
    }

    fn nary(
        items: impl IntoIterator<Item = MaxPoly>,
        same: impl Fn(&MaxPoly) -> bool,
        build: impl Fn(Vec<MaxPoly>) -> MaxPoly,
        unit: MaxPoly,
    ) -> Self {
        let mut flat = Vec::new();
        for i in items {
            if same(&i) {
                match i {
                    MaxPoly::Sum(v) | MaxPoly::Product(v) | MaxPoly::Max(v) => flat.extend(v),
                    _ => unreachable!(),
                }
            } else {
                flat.push(i);
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat.pop().unwrap(),
            _ => build(flat),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            MaxPoly::Const(_) => {}
            MaxPoly::Var(v) => {
                out.insert(v.clone());
            }
            MaxPoly::Sum(xs) | MaxPoly::Product(xs) | MaxPoly::Max(xs) => {
                xs.iter().for_each(|x| x.collect_vars(out))
            }
        }
    }

    pub fn eval(&self, at: &Point) -> Result<Rational, MissingVariable> {
        Ok(match self {
            MaxPoly::Const(c) => c.clone(),
            MaxPoly::Var(v) => at.get(v).cloned().ok_or_else(|| MissingVariable(v.clone()))?,
            MaxPoly::Sum(xs) => {
                let mut acc = Rational::zero();
                for x in xs {
                    acc += x.eval(at)?;
                }
                acc
            }
            MaxPoly::Product(xs) => {
                let mut acc = Rational::one();
                for x in xs {
                    acc *= x.eval(at)?;
                }
                acc
            }
            MaxPoly::Max(xs) => {
                let mut acc = Rational::zero();
                for x in xs {
                    let v = x.eval(at)?;
                    if v > acc {
                        acc = v;
                    }
                }
                acc
            }
        })
    }

    /// Simultaneous substitution of variables by expressions.
    pub fn substitute(&self, map: &BTreeMap<String, MaxPoly>) -> MaxPoly {
        match self {
            MaxPoly::Const(_) => self.clone(),
            MaxPoly::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            MaxPoly::Sum(xs) => MaxPoly::sum(xs.iter().map(|x| x.substitute(map))),
            MaxPoly::Product(xs) => MaxPoly::product(xs.iter().map(|x| x.substitute(map))),
            MaxPoly::Max(xs) => MaxPoly::max(xs.iter().map(|x| x.substitute(map))),
        }
    }

    /// `self[var := g]`.
    pub fn compose(&self, var: &str, g: &MaxPoly) -> MaxPoly {
        let mut m = BTreeMap::new();
        m.insert(var.to_string(), g.clone());
        self.substitute(&m)
    }

    /// Parses the annotation expression syntax (`x + 2*max(y, 1/2)`).
    pub fn parse(src: &str) -> Result<MaxPoly, crate::parser::ParseError> {
        crate::parser::parse_maxpoly(src)
    }

    fn prec(&self) -> u8 {
        match self {
            MaxPoly::Sum(_) => 0,
            MaxPoly::Product(_) => 1,
            _ => 2,
        }
    }
}

impl Add for MaxPoly {
    type Output = MaxPoly;
    fn add(self, rhs: MaxPoly) -> MaxPoly {
        MaxPoly::sum([self, rhs])
    }
}

impl Mul for MaxPoly {
    type Output = MaxPoly;
    fn mul(self, rhs: MaxPoly) -> MaxPoly {
        MaxPoly::product([self, rhs])
    }
}

impl fmt::Display for MaxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxPoly::Const(c) => write!(f, "{c}"),
            MaxPoly::Var(v) => f.write_str(v),
            MaxPoly::Sum(xs) | MaxPoly::Product(xs) => {
                let (sep, p) = if matches!(self, MaxPoly::Sum(_)) {
                    (" + ", 0)
                } else {
                    ("*", 1)
                };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if x.prec() <= p && !(p == 0 && x.prec() == 0) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            MaxPoly::Max(xs) => {
                f.write_str("max(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for MaxPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) mod serde_rat {
    use super::{Point, Rational};
    use serde::ser::SerializeMap;
    use serde::Serializer;

    pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn point<S: Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(p.len()))?;
        for (k, v) in p {
            m.serialize_entry(k, &v.to_string())?;
        }
        m.end()
    }
}
