//! Max-of-polynomials normal form.
//!
//! On ℝ⁺ both `+` and `×` are monotone, so `max` distributes outward:
//! `a + max(b, c) = max(a + b, a + c)` and likewise for products. Every
//! expression therefore equals the pointwise max of finitely many
//! polynomials with positive coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use super::expr::{MaxPoly, Point, Rational};

/// Product of variable powers, sorted by variable name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: &str) -> Self {
        Monomial(vec![(v.to_string(), 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn powers(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<String, u32> = self.0.iter().cloned().collect();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_default() += e;
        }
        Monomial(m.into_iter().collect())
    }

    pub fn eval(&self, at: &Point) -> Option<Rational> {
        let mut acc = Rational::one();
        for (v, e) in &self.0 {
            let x = at.get(v)?;
            for _ in 0..*e {
                acc *= x;
            }
        }
        Some(acc)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            f.write_str(v)?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial with strictly positive rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn var(v: &str) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, at: &Point) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += c * m.eval(at)?;
        }
        Some(acc)
    }

    /// Coefficient-wise `self ≤ other`. Since every monomial is nonnegative
    /// on ℝ⁺, this implies `self(x) ≤ other(x)` for every point.
    pub fn dominated_by(&self, other: &Polynomial) -> bool {
        self.terms.iter().all(|(m, c)| *c <= other.coefficient(m))
    }

    pub fn to_maxpoly(&self) -> MaxPoly {
        MaxPoly::sum(self.terms.iter().map(|(m, c)| {
            let mut factors = Vec::new();
            if !c.is_one() || m.0.is_empty() {
                factors.push(MaxPoly::Const(c.clone()));
            }
            for (v, e) in &m.0 {
                for _ in 0..*e {
                    factors.push(MaxPoly::var(v.clone()));
                }
            }
            MaxPoly::product(factors)
        }))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match (c.is_one(), m.0.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (true, false) => write!(f, "{m}")?,
                (false, false) => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

/// Pointwise max of a set of polynomials. Duplicates and polynomials
/// dominated by another member are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    polys: Vec<Polynomial>,
}

impl NormalForm {
    fn from_polys(polys: impl IntoIterator<Item = Polynomial>) -> Self {
        let mut all: Vec<Polynomial> = polys.into_iter().collect();
        all.sort();
        all.dedup();
        let mut keep: Vec<Polynomial> = Vec::new();
        for (i, p) in all.iter().enumerate() {
            let dominated = all
                .iter()
                .enumerate()
                .any(|(j, q)| i != j && p.dominated_by(q) && p != q);
            if !dominated {
                keep.push(p.clone());
            }
        }
        if keep.is_empty() {
            keep.push(Polynomial::zero());
        }
        NormalForm { polys: keep }
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn is_single(&self) -> bool {
        self.polys.len() == 1
    }

    pub fn eval(&self, at: &Point) -> Option<Rational> {
        let mut best = Rational::zero();
        for p in &self.polys {
            let v = p.eval(at)?;
            if v > best {
                best = v;
            }
        }
        Some(best)
    }

    pub fn to_maxpoly(&self) -> MaxPoly {
        MaxPoly::max(self.polys.iter().map(Polynomial::to_maxpoly))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polys.len() == 1 {
            return write!(f, "{}", self.polys[0]);
        }
        f.write_str("max{")?;
        for (i, p) in self.polys.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Distributes every `max` outward.
pub fn normalize(f: &MaxPoly) -> NormalForm {
    NormalForm::from_polys(expand(f))
}

fn expand(f: &MaxPoly) -> Vec<Polynomial> {
    match f {
        MaxPoly::Const(c) => vec![Polynomial::constant(c.clone())],
        MaxPoly::Var(v) => vec![Polynomial::var(v)],
        MaxPoly::Max(xs) => {
            let all: Vec<Polynomial> = xs.iter().flat_map(expand).collect();
            NormalForm::from_polys(all).polys
        }
        MaxPoly::Sum(xs) | MaxPoly::Product(xs) => {
            let is_sum = matches!(f, MaxPoly::Sum(_));
            let mut acc = vec![if is_sum {
                Polynomial::zero()
            } else {
                Polynomial::constant(Rational::one())
            }];
            for x in xs {
                let parts = expand(x);
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for a in &acc {
                    for b in &parts {
                        next.push(if is_sum { a.add(b) } else { a.mul(b) });
                    }
                }
                acc = NormalForm::from_polys(next).polys;
            }
            acc
        }
    }
}
