//! Binding annotation files to program symbols.
//!
//! Method entries take the call arguments followed by the receiver; class
//! entries take the constructor arguments; weights take the main attributes
//! in declaration order, preceded by a temporal formal for looped commands.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::interp::ObjectValue;
use crate::lang::{classify, CmdPath, Expression, Program};
use crate::maxpoly::{additive_constant, has_subterm_property, CompareConfig, CompareVerdict, MaxPoly, Rational};
use crate::parser::AnnotationSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub formals: Vec<String>,
    pub body: MaxPoly,
    /// `α` when the body is `x₁ + … + xₘ + α`.
    #[serde(skip)]
    pub additive: Option<Rational>,
}

impl Entry {
    pub fn new(formals: Vec<String>, body: MaxPoly) -> Self {
        let additive = additive_constant(&body, &formals);
        Entry {
            formals,
            body,
            additive,
        }
    }

    /// `body[formals := args]`.
    pub fn apply(&self, args: &[MaxPoly]) -> MaxPoly {
        let map: BTreeMap<String, MaxPoly> = self.formals.iter().cloned().zip(args.iter().cloned()).collect();
        self.body.substitute(&map)
    }

    pub fn eval(&self, args: &[Rational]) -> Rational {
        if let Some(alpha) = &self.additive {
            return args.iter().fold(alpha.clone(), |acc, x| acc + x);
        }
        let at = self.formals.iter().cloned().zip(args.iter().cloned()).collect();
        self.body.eval(&at).expect("bodies mention only their formals")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("no sup-interpretation for `{0}`")]
pub struct UndefinedSymbol(pub String);

/// Max-Poly functions for methods and constructors.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AssignmentMap {
    pub methods: BTreeMap<String, Entry>,
    pub classes: BTreeMap<String, Entry>,
}

impl AssignmentMap {
    pub fn domain(&self) -> BTreeSet<&str> {
        self.methods.keys().chain(self.classes.keys()).map(String::as_str).collect()
    }

    /// Value of an assignment on a ground object, bottom-up.
    pub fn ground(&self, v: &ObjectValue) -> Result<Rational, UndefinedSymbol> {
        let mut memo: HashMap<usize, Rational> = HashMap::new();
        let mut stack: Vec<(&ObjectValue, bool)> = vec![(v, false)];
        while let Some((node, expanded)) = stack.pop() {
            if memo.contains_key(&node.id()) {
                continue;
            }
            if !expanded && node.arity() > 0 {
                stack.push((node, true));
                for c in node.children() {
                    if !memo.contains_key(&c.id()) {
                        stack.push((c, false));
                    }
                }
                continue;
            }
            let entry = self
                .classes
                .get(node.ctor())
                .ok_or_else(|| UndefinedSymbol(node.ctor().to_string()))?;
            let args: Vec<Rational> = node.children().iter().map(|c| memo[&c.id()].clone()).collect();
            memo.insert(node.id(), entry.eval(&args));
        }
        Ok(memo.remove(&v.id()).expect("root evaluated"))
    }

    /// The constant of the sandwich `|v| ≤ θ*(v) ≤ α·|v|`: the largest
    /// additive constant over constructors of positive arity and the values
    /// of nullary constructors. `None` when a positive-arity entry is not
    /// additive or a constructor has no entry.
    pub fn lemma1_alpha(&self, p: &Program) -> Option<Rational> {
        let mut alpha = Rational::zero();
        for (c, arity) in p.constructors() {
            let e = self.classes.get(&c)?;
            let beta = if arity > 0 {
                e.additive.clone()?
            } else {
                e.eval(&[])
            };
            if beta > alpha {
                alpha = beta;
            }
        }
        Some(alpha)
    }
}

/// The partial assignment of an expression: a Max-Poly over the attribute
/// and parameter names it mentions.
pub fn partial_assignment(e: &Expression, i: &AssignmentMap) -> Result<MaxPoly, UndefinedSymbol> {
    match e {
        Expression::Param(x) | Expression::Attr(x) => Ok(MaxPoly::var(x.clone())),
        Expression::New { class, args } => {
            let entry = i.classes.get(class).ok_or_else(|| UndefinedSymbol(class.clone()))?;
            let a = args
                .iter()
                .map(|x| partial_assignment(x, i))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(entry.apply(&a))
        }
        Expression::Call {
            receiver,
            method,
            args,
        } => {
            let entry = i.methods.get(method).ok_or_else(|| UndefinedSymbol(method.clone()))?;
            let mut a = args
                .iter()
                .map(|x| partial_assignment(x, i))
                .collect::<Result<Vec<_>, _>>()?;
            a.push(MaxPoly::var(receiver.clone()));
            Ok(entry.apply(&a))
        }
    }
}

/// A weight attached to a labeled command of main.
#[derive(Debug, Clone, Serialize)]
pub struct BoundWeight {
    pub label: String,
    pub path: CmdPath,
    /// Name of the temporal formal for looped commands.
    pub temporal: Option<String>,
    /// Main attributes, in order.
    pub formals: Vec<String>,
    pub body: MaxPoly,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct WeightMap {
    pub entries: BTreeMap<String, BoundWeight>,
}

impl WeightMap {
    pub fn at_path(&self, path: &CmdPath) -> Option<&BoundWeight> {
        self.entries.values().find(|w| &w.path == path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum BindError {
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        hint: Option<String>,
    },
    NotAdditive {
        class: String,
        body: String,
    },
    SubtermViolation {
        label: String,
        formal: String,
        verdict: CompareVerdict,
    },
    MissingAnnotation {
        symbol: String,
        kind: String,
    },
    UnknownLabel {
        label: String,
    },
    NotWeightBearing {
        label: String,
    },
    UnlabeledWeightTarget {
        path: CmdPath,
    },
    FormalMismatch {
        label: String,
        position: usize,
        expected: String,
        found: String,
    },
}

impl fmt::Display for BindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindError::ArityMismatch {
                symbol,
                expected,
                found,
                hint,
            } => {
                write!(f, "`{symbol}` needs {expected} formals, found {found}")?;
                if let Some(h) = hint {
                    write!(f, " ({h})")?;
                }
                Ok(())
            }
            BindError::NotAdditive { class, body } => {
                write!(f, "class entry `{class}` = {body} is not of the form x1 + ... + xn + a with a >= 1")
            }
            BindError::SubtermViolation { label, formal, verdict } => match verdict.witness() {
                Some(w) => write!(
                    f,
                    "weight `{label}` is below its formal `{formal}` at {:?} ({} < {})",
                    w.point
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>(),
                    w.lhs,
                    w.rhs
                ),
                None => write!(f, "weight `{label}`: subterm property for `{formal}` not established"),
            },
            BindError::MissingAnnotation { symbol, kind } => write!(f, "missing {kind} annotation for `{symbol}`"),
            BindError::UnknownLabel { label } => write!(f, "no command of main is labeled `{label}`"),
            BindError::NotWeightBearing { label } => {
                write!(f, "command `{label}` is not flat, minimum and looped or whiled; it takes no weight")
            }
            BindError::UnlabeledWeightTarget { path } => {
                write!(f, "the command at {path} needs a weight but has no label")
            }
            BindError::FormalMismatch {
                label,
                position,
                expected,
                found,
            } => write!(f, "weight `{label}`: formal {position} is `{found}`, expected `{expected}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
#[serde(transparent)]
pub struct BindErrors(pub Vec<BindError>);

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityCheck {
    pub class: String,
    pub additive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubtermCheck {
    pub label: String,
    pub formal: String,
    pub verdict: CompareVerdict,
}

/// Form checks whose failure makes the annotations unusable for a proof
/// but still lets obligations be generated.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Audit {
    pub additivity: Vec<AdditivityCheck>,
    pub subterm: Vec<SubtermCheck>,
}

impl Audit {
    pub fn findings(&self) -> Vec<BindError> {
        let mut out = Vec::new();
        for a in self.additivity.iter().filter(|a| !a.additive) {
            out.push(BindError::NotAdditive {
                class: a.class.clone(),
                body: String::new(),
            });
        }
        for s in self.subterm.iter().filter(|s| !s.verdict.is_verified()) {
            out.push(BindError::SubtermViolation {
                label: s.label.clone(),
                formal: s.formal.clone(),
                verdict: s.verdict.clone(),
            });
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.findings().is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Binding {
    pub assignment: AssignmentMap,
    pub weights: WeightMap,
    pub audit: Audit,
    pub warnings: Vec<String>,
}

/// Symbols whose sup-interpretation main depends on.
fn required_symbols(p: &Program) -> BTreeSet<String> {
    let (prec, _) = crate::lang::precedence::build(p);
    let body = &p.main.body;
    let mut out = BTreeSet::new();
    for s in body.called_methods().into_iter().chain(body.instantiated_classes()) {
        out.extend(prec.reachable_from(s));
    }
    out
}

/// Binds annotations, keeping additivity and subterm failures as audit
/// findings instead of errors.
pub fn bind_lenient(ann: &AnnotationSet, p: &Program, cfg: &CompareConfig) -> Result<Binding, BindErrors> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut assignment = AssignmentMap::default();
    let mut audit = Audit::default();

    for e in &ann.sups {
        let Some(m) = p.method(&e.symbol) else {
            warnings.push(format!("annotation for unknown method `{}` is unused", e.symbol));
            continue;
        };
        let expected = m.arity() + 1;
        if e.formals.len() != expected {
            let hint = (e.formals.len() == m.arity())
                .then(|| "missing receiver slot: the receiver is the last formal".to_string());
            errors.push(BindError::ArityMismatch {
                symbol: e.symbol.clone(),
                expected,
                found: e.formals.len(),
                hint,
            });
            continue;
        }
        assignment
            .methods
            .insert(e.symbol.clone(), Entry::new(e.formals.clone(), e.body.clone()));
    }

    for e in &ann.classes {
        let Some(arity) = p.class_arity(&e.symbol) else {
            warnings.push(format!("annotation for unknown class `{}` is unused", e.symbol));
            continue;
        };
        if e.formals.len() != arity {
            errors.push(BindError::ArityMismatch {
                symbol: e.symbol.clone(),
                expected: arity,
                found: e.formals.len(),
                hint: None,
            });
            continue;
        }
        let entry = Entry::new(e.formals.clone(), e.body.clone());
        if arity > 0 {
            audit.additivity.push(AdditivityCheck {
                class: e.symbol.clone(),
                additive: entry.additive.is_some(),
                alpha: entry.additive.as_ref().map(|a| a.to_string()),
            });
        }
        assignment.classes.insert(e.symbol.clone(), entry);
    }
    for (c, arity) in p.constructors() {
        if arity == 0 && !assignment.classes.contains_key(&c) {
            warnings.push(format!("nullary constructor `{c}` has no entry; using 0"));
            assignment.classes.insert(c, Entry::new(Vec::new(), MaxPoly::zero()));
        }
    }

    let required = required_symbols(p);
    for s in &required {
        let present = if p.method(s).is_some() && p.class_arity(s).is_none() {
            assignment.methods.contains_key(s)
        } else {
            assignment.classes.contains_key(s)
        };
        let reported = errors
            .iter()
            .any(|e| matches!(e, BindError::ArityMismatch { symbol, .. } if symbol == s));
        if !present && !reported {
            let kind = if p.class_arity(s).is_some() { "class" } else { "method" };
            errors.push(BindError::MissingAnnotation {
                symbol: s.clone(),
                kind: kind.into(),
            });
        }
    }

    // Weights.
    let cls = classify(p);
    let attrs = &p.main.attributes;
    let mut weights = WeightMap::default();
    for w in &ann.weights {
        let Some((path, info)) = cls.by_label(&w.label) else {
            errors.push(BindError::UnknownLabel { label: w.label.clone() });
            continue;
        };
        if !info.flags.weight_bearing() {
            errors.push(BindError::NotWeightBearing { label: w.label.clone() });
            continue;
        }
        let looped = info.flags.looped;
        let expected = attrs.len() + usize::from(looped);
        if w.formals.len() != expected {
            errors.push(BindError::ArityMismatch {
                symbol: w.label.clone(),
                expected,
                found: w.formals.len(),
                hint: Some(if looped {
                    "looped command: temporal formal first, then the main attributes".into()
                } else {
                    "whiled command: the main attributes, no temporal formal".into()
                }),
            });
            continue;
        }
        let (temporal, rest) = if looped {
            (Some(w.formals[0].clone()), &w.formals[1..])
        } else {
            (None, &w.formals[..])
        };
        let mut ok = true;
        for (i, (f, a)) in rest.iter().zip(attrs).enumerate() {
            if f != a {
                errors.push(BindError::FormalMismatch {
                    label: w.label.clone(),
                    position: i + usize::from(looped),
                    expected: a.clone(),
                    found: f.clone(),
                });
                ok = false;
            }
        }
        if let Some(t) = &temporal {
            if attrs.contains(t) {
                errors.push(BindError::FormalMismatch {
                    label: w.label.clone(),
                    position: 0,
                    expected: "a fresh temporal name".into(),
                    found: t.clone(),
                });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        for (formal, verdict) in has_subterm_property(&w.body, attrs, cfg) {
            audit.subterm.push(SubtermCheck {
                label: w.label.clone(),
                formal,
                verdict,
            });
        }
        weights.entries.insert(
            w.label.clone(),
            BoundWeight {
                label: w.label.clone(),
                path: path.clone(),
                temporal,
                formals: attrs.clone(),
                body: w.body.clone(),
            },
        );
    }
    for path in cls.weight_bearing() {
        let info = &cls.occurrences[path];
        match &info.label {
            None => errors.push(BindError::UnlabeledWeightTarget { path: path.clone() }),
            Some(l) if ann.weight(l).is_none() => errors.push(BindError::MissingAnnotation {
                symbol: l.clone(),
                kind: "weight".into(),
            }),
            Some(_) => {}
        }
    }

    if errors.is_empty() {
        Ok(Binding {
            assignment,
            weights,
            audit,
            warnings,
        })
    } else {
        Err(BindErrors(errors))
    }
}

/// Binds annotations and rejects non-additive class entries and weights
/// without the subterm property.
pub fn bind(ann: &AnnotationSet, p: &Program, cfg: &CompareConfig) -> Result<(AssignmentMap, WeightMap), BindErrors> {
    let b = bind_lenient(ann, p, cfg)?;
    let mut findings = b.audit.findings();
    for f in &mut findings {
        if let BindError::NotAdditive { class, body } = f {
            *body = b.assignment.classes[class.as_str()].body.to_string();
        }
    }
    if findings.is_empty() {
        Ok((b.assignment, b.weights))
    } else {
        Err(BindErrors(findings))
    }
}
