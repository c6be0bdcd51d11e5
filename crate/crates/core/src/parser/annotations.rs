//! `.sup` annotation files.
//!
//! ```text
//! file    := entry*
//! entry   := "sup" ["class"] NAME ["(" formals ")"] "=" poly [";"]
//!          | "weight" LABEL "(" formals ")" "=" poly [";"]
//!          | "discrepancy" STRING [";"]
//! poly    := term ("+" term)*
//! term    := atom ("*" atom)*
//! atom    := INT ["/" INT] | IDENT | "max" "(" poly ("," poly)* ")" | "(" poly ")"
//! ```

use std::collections::BTreeSet;

use num::BigInt;
use serde::Serialize;

use super::error::{ParseError, ParseErrorKind};
use super::lexer::{Cursor, Tok};
use crate::lang::ast::Span;
use crate::maxpoly::{MaxPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupEntry {
    pub symbol: String,
    pub formals: Vec<String>,
    pub body: MaxPoly,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightEntry {
    pub label: String,
    pub formals: Vec<String>,
    pub body: MaxPoly,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AnnotationSet {
    /// Method entries; the receiver is the last formal.
    pub sups: Vec<SupEntry>,
    pub classes: Vec<SupEntry>,
    pub weights: Vec<WeightEntry>,
    /// Free-text notes carried into reports.
    pub discrepancies: Vec<String>,
}

impl AnnotationSet {
    pub fn sup(&self, name: &str) -> Option<&SupEntry> {
        self.sups.iter().find(|e| e.symbol == name)
    }

    pub fn class(&self, name: &str) -> Option<&SupEntry> {
        self.classes.iter().find(|e| e.symbol == name)
    }

    pub fn weight(&self, label: &str) -> Option<&WeightEntry> {
        self.weights.iter().find(|e| e.label == label)
    }
}

const RESERVED: &[&str] = &["sup", "weight", "class", "max", "discrepancy"];

struct PolyParser<'a, 'c> {
    cur: &'c mut Cursor<'a>,
}

impl PolyParser<'_, '_> {
    fn unknown(&self, what: impl Into<String>) -> ParseError {
        self.cur.error(ParseErrorKind::UnknownConstruct(what.into()))
    }

    fn sum(&mut self) -> Result<MaxPoly, ParseError> {
        let mut items = vec![self.product()?];
        while self.cur.eat_sym('+') {
            items.push(self.product()?);
        }
        self.reject_operator()?;
        Ok(MaxPoly::sum(items))
    }

    fn product(&mut self) -> Result<MaxPoly, ParseError> {
        let mut items = vec![self.atom()?];
        while self.cur.eat_sym('*') {
            items.push(self.atom()?);
        }
        self.reject_operator()?;
        Ok(MaxPoly::product(items))
    }

    fn reject_operator(&self) -> Result<(), ParseError> {
        match self.cur.peek() {
            Tok::Sym('-') => Err(self.unknown("subtraction")),
            Tok::Sym('/') => Err(self.unknown("division of non-literals")),
            Tok::Sym('^') => Err(self.unknown("exponentiation (write x*x)")),
            Tok::Sym('.') => Err(self.unknown("decimal literal (write a/b)")),
            _ => Ok(()),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        match self.cur.peek().clone() {
            Tok::Number(n) => {
                self.cur.next();
                Ok(n.parse().expect("lexer yields digits"))
            }
            Tok::Sym('-') => Err(self.unknown("negative constant")),
            _ => Err(self.cur.unexpected(&["integer"])),
        }
    }

    fn atom(&mut self) -> Result<MaxPoly, ParseError> {
        match self.cur.peek().clone() {
            Tok::Number(_) => {
                let n = self.integer()?;
                if self.cur.at_sym('.') {
                    return Err(self.unknown("decimal literal (write a/b)"));
                }
                let q = if self.cur.eat_sym('/') {
                    let d = self.integer()?;
                    if d == BigInt::from(0) {
                        return Err(self.cur.error(ParseErrorKind::Invalid("zero denominator".into())));
                    }
                    Rational::new(n, d)
                } else {
                    Rational::from_integer(n)
                };
                Ok(MaxPoly::Const(q))
            }
            Tok::Ident(name) => {
                self.cur.next();
                if self.cur.at_sym('(') {
                    if name != "max" {
                        return Err(self.unknown(format!("function `{name}`")));
                    }
                    self.cur.next();
                    let mut items = vec![self.sum()?];
                    while self.cur.eat_sym(',') {
                        items.push(self.sum()?);
                    }
                    self.cur.expect_sym(')')?;
                    Ok(MaxPoly::max(items))
                } else if name == "max" {
                    Err(self.cur.unexpected(&["`(`"]))
                } else {
                    Ok(MaxPoly::Var(name))
                }
            }
            Tok::Sym('(') => {
                self.cur.next();
                let e = self.sum()?;
                self.cur.expect_sym(')')?;
                Ok(e)
            }
            Tok::Sym('-') => Err(self.unknown("negative constant")),
            _ => Err(self.cur.unexpected(&["number", "identifier", "`max`", "`(`"])),
        }
    }
}

/// Parses a standalone Max-Poly expression.
pub fn parse_maxpoly(src: &str) -> Result<MaxPoly, ParseError> {
    let mut cur = Cursor::new(src, "<expr>")?;
    let e = PolyParser { cur: &mut cur }.sum()?;
    if *cur.peek() != Tok::Eof {
        return Err(cur.unexpected(&["`+`", "`*`", "end of input"]));
    }
    Ok(e)
}

fn formals(cur: &mut Cursor<'_>) -> Result<Vec<String>, ParseError> {
    let mut out: Vec<String> = Vec::new();
    if !cur.eat_sym('(') {
        return Ok(out);
    }
    if !cur.at_sym(')') {
        loop {
            let name = cur.ident(RESERVED)?;
            if out.contains(&name) {
                return Err(cur.error(ParseErrorKind::Invalid(format!("duplicate formal `{name}`"))));
            }
            out.push(name);
            if !cur.eat_sym(',') {
                break;
            }
        }
    }
    cur.expect_sym(')')?;
    Ok(out)
}

fn body(cur: &mut Cursor<'_>, formals: &[String]) -> Result<MaxPoly, ParseError> {
    cur.expect_sym('=')?;
    let (l, c) = cur.here();
    let e = PolyParser { cur: &mut *cur }.sum()?;
    let declared: BTreeSet<&String> = formals.iter().collect();
    if let Some(v) = e.variables().iter().find(|v| !declared.contains(v)) {
        return Err(ParseError::new(
            cur.origin,
            l,
            c,
            ParseErrorKind::Invalid(format!("`{v}` is not a declared formal")),
        ));
    }
    cur.eat_sym(';');
    Ok(e)
}

pub fn parse_annotations(src: &str, origin: &str) -> Result<AnnotationSet, ParseError> {
    let mut cur = Cursor::new(src, origin)?;
    let mut set = AnnotationSet::default();
    while *cur.peek() != Tok::Eof {
        let (l, c) = cur.here();
        let span = Span::new(l, c);
        let dup = |cur: &Cursor<'_>, what: &str| {
            ParseError::new(cur.origin, l, c, ParseErrorKind::Invalid(format!("duplicate entry for {what}")))
        };
        if cur.eat_kw("sup") {
            let is_class = cur.eat_kw("class");
            let symbol = cur.ident(RESERVED)?;
            let f = formals(&mut cur)?;
            let b = body(&mut cur, &f)?;
            let entry = SupEntry {
                symbol: symbol.clone(),
                formals: f,
                body: b,
                span,
            };
            if is_class {
                if set.class(&symbol).is_some() {
                    return Err(dup(&cur, &format!("class `{symbol}`")));
                }
                set.classes.push(entry);
            } else {
                if set.sup(&symbol).is_some() {
                    return Err(dup(&cur, &format!("`{symbol}`")));
                }
                set.sups.push(entry);
            }
        } else if cur.eat_kw("weight") {
            let label = cur.ident(RESERVED)?;
            let f = formals(&mut cur)?;
            let b = body(&mut cur, &f)?;
            if set.weight(&label).is_some() {
                return Err(dup(&cur, &format!("label `{label}`")));
            }
            set.weights.push(WeightEntry {
                label,
                formals: f,
                body: b,
                span,
            });
        } else if cur.eat_kw("discrepancy") {
            match cur.next() {
                Tok::Str(s) => set.discrepancies.push(s),
                _ => return Err(ParseError::new(origin, l, c, ParseErrorKind::Invalid("expected a string after `discrepancy`".into()))),
            }
            cur.eat_sym(';');
        } else {
            return Err(cur.unexpected(&["`sup`", "`weight`", "`discrepancy`"]));
        }
    }
    Ok(set)
}
