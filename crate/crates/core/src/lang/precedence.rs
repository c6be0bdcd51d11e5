//! Call precedence over function symbols.
//!
//! `f ≥ g` when `g` occurs in the body of `f`, closed reflexively and
//! transitively. Constructors appear as symbols too (via `new C`) but never call
//! anything.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::ast::{MethodRef, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown function symbol `{symbol}` called from `{caller}`")]
pub struct UnknownSymbol {
    pub caller: String,
    pub symbol: String,
}

#[derive(Debug, Clone)]
pub struct Precedence {
    symbols: Vec<String>,
    direct: BTreeMap<String, BTreeSet<String>>,
    geq: BTreeSet<(String, String)>,
}

impl Precedence {
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Direct callees of `f`.
    pub fn callees(&self, f: &str) -> impl Iterator<Item = &str> {
        self.direct.get(f).into_iter().flatten().map(String::as_str)
    }

    pub fn geq(&self, f: &str, g: &str) -> bool {
        f == g || self.geq.contains(&(f.to_string(), g.to_string()))
    }

    pub fn gt(&self, f: &str, g: &str) -> bool {
        self.geq(f, g) && !self.geq(g, f)
    }

    /// Symbols reachable from `f` through calls, `f` included.
    pub fn reachable_from(&self, f: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.insert(f.to_string());
        for (a, b) in &self.geq {
            if a == f {
                out.insert(b.clone());
            }
        }
        out
    }

    /// Groups of mutually recursive symbols. A method calling itself is a
    /// group of one.
    pub fn cycles(&self) -> Vec<Vec<String>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for f in &self.symbols {
            if seen.contains(f) {
                continue;
            }
            let group: Vec<String> = self
                .symbols
                .iter()
                .filter(|g| self.geq(f, g) && self.geq(g, f))
                .cloned()
                .collect();
            let recursive = group.len() > 1 || self.callees(f).any(|g| g == f);
            seen.extend(group.iter().cloned());
            if recursive {
                out.push(group);
            }
        }
        out
    }
}

/// Builds the direct-call relation, tolerating unknown callees (they are
/// left out of the relation and reported by the well-formedness checker).
pub(crate) fn build(p: &Program) -> (Precedence, Vec<UnknownSymbol>) {
    let mut symbols = Vec::new();
    let mut direct: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut unknown = Vec::new();
    for (name, _) in p.constructors() {
        symbols.push(name.clone());
        direct.entry(name).or_default();
    }
    if p.classes.iter().all(|c| c.method(super::ast::BUILTIN_ADD).is_none()) {
        symbols.push(super::ast::BUILTIN_ADD.to_string());
        direct.entry(super::ast::BUILTIN_ADD.to_string()).or_default();
    }
    for c in &p.classes {
        for m in &c.methods {
            symbols.push(m.name.clone());
            let entry = direct.entry(m.name.clone()).or_default();
            for g in m.body.called_methods() {
                match p.method(g) {
                    Some(MethodRef::User(..)) | Some(MethodRef::BuiltinAdd) => {
                        entry.insert(g.to_string());
                    }
                    None => unknown.push(UnknownSymbol {
                        caller: m.name.clone(),
                        symbol: g.to_string(),
                    }),
                }
            }
            for k in m.body.instantiated_classes() {
                if p.class_arity(k).is_some() {
                    entry.insert(k.to_string());
                } else {
                    unknown.push(UnknownSymbol {
                        caller: m.name.clone(),
                        symbol: k.to_string(),
                    });
                }
            }
        }
    }
    symbols.sort();
    symbols.dedup();

    // Transitive closure by repeated propagation; symbol counts are small.
    let mut geq: BTreeSet<(String, String)> = BTreeSet::new();
    for (f, gs) in &direct {
        for g in gs {
            geq.insert((f.clone(), g.clone()));
        }
    }
    loop {
        let mut added = Vec::new();
        for (a, b) in &geq {
            for c in direct.get(b).into_iter().flatten() {
                let pair = (a.clone(), c.clone());
                if !geq.contains(&pair) {
                    added.push(pair);
                }
            }
        }
        if added.is_empty() {
            break;
        }
        geq.extend(added);
    }
    (
        Precedence {
            symbols,
            direct,
            geq,
        },
        unknown,
    )
}

/// The precedence `≥_F` of a program, with its strict part available via
/// [`Precedence::gt`] and recursion reported by [`Precedence::cycles`].
pub fn precedence(p: &Program) -> Result<Precedence, UnknownSymbol> {
    let (prec, mut unknown) = build(p);
    if unknown.is_empty() {
        Ok(prec)
    } else {
        Err(unknown.remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn move_calls_add() {
        let p = parse_program(crate::fixtures::POSITION_OO, "position.oo").unwrap();
        let prec = precedence(&p).unwrap();
        assert!(prec.geq("move", "add"));
        assert!(prec.gt("move", "add"));
        assert!(!prec.geq("add", "move"));
        assert!(prec.cycles().is_empty());
    }

    #[test]
    fn skip_body_only_reflexive() {
        let src = "Class C { var A; m() { skip; return A; } } Class main { var X; skip }";
        let p = parse_program(src, "t").unwrap();
        let prec = precedence(&p).unwrap();
        assert!(prec.geq("m", "m"));
        assert_eq!(prec.callees("m").count(), 0);
        for s in prec.symbols() {
            if s != "m" {
                assert!(!prec.geq("m", s));
            }
        }
    }

    #[test]
    fn mutual_recursion_is_a_cycle() {
        let src = "Class C { var A; var B; f() { A := B.g(); return A; } g() { B := A.f(); return B; } } \
                   Class main { var X; skip }";
        let p = parse_program(src, "t").unwrap();
        let prec = precedence(&p).unwrap();
        assert_eq!(prec.cycles(), vec![vec!["f".to_string(), "g".to_string()]]);
        assert!(!prec.gt("f", "g"));
        assert!(prec.geq("f", "g") && prec.geq("g", "f"));
    }

    #[test]
    fn unknown_callee_is_an_error() {
        let src = "Class C { var A; f() { A := A.nope(); return A; } } Class main { var X; skip }";
        let p = parse_program(src, "t").unwrap();
        let err = precedence(&p).unwrap_err();
        assert_eq!(err.symbol, "nope");
    }
}
