//! Proof obligations for weighted commands of main and the overall verdict.
//!
//! For a weighted command `Cm` with weight `ω` over the main attributes
//! `X₁…Xₙ`, every assignment `Xᵢ := e` below `Cm` yields
//! `ω(T+1, X̄) ≥ ω(T, X̄[Xᵢ := θ*(e)])`, and every call `Xⱼ.f(ē)` inside such
//! an assignment yields the same inequality at position `j` with
//! `θ*(Xⱼ.f(ē))`. Commands under a `while` drop the temporal variable.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::annotations::{bind_lenient, partial_assignment, Audit, Binding, BindErrors, BoundWeight, UndefinedSymbol};
use crate::interp::Trace;
use crate::lang::{CmdPath, CommandKind, Expression, Program, Span};
use crate::maxpoly::{compare_geq, CompareConfig, CompareVerdict, MaxPoly, Point, Rational};
use crate::parser::{print_expr, AnnotationSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObligationKind {
    /// `Xᵢ := e`: position `i` takes `θ*(e)`.
    AssignTarget { index: usize, attribute: String },
    /// A call on `Xⱼ`: position `j` takes `θ*` of the call.
    CallSideEffect { index: usize, receiver: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    #[serde(flatten)]
    pub kind: ObligationKind,
    /// Occurrence of the assignment inside main.
    pub path: CmdPath,
    pub span: Span,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub label: String,
    pub weight_path: CmdPath,
    /// Temporal variable when the weighted command is looped.
    pub temporal: Option<String>,
    /// Position in the main attribute vector that is substituted.
    pub position: usize,
    pub substituted: MaxPoly,
    pub lhs: MaxPoly,
    pub rhs: MaxPoly,
    pub provenance: Vec<Provenance>,
}

impl Obligation {
    pub fn render(&self) -> String {
        format!("{} >= {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ObligationError {
    #[error("weighted command at {0} has no weight")]
    MissingWeight(CmdPath),
    #[error("{0}")]
    MissingSupInterpretation(UndefinedSymbol),
}

fn lhs_of(w: &BoundWeight) -> MaxPoly {
    match &w.temporal {
        Some(t) => w.body.compose(t, &(MaxPoly::var(t.clone()) + MaxPoly::one())),
        None => w.body.clone(),
    }
}

/// All obligations, one per assignment target and one per call receiver,
/// without deduplication.
pub fn generate_obligations_raw(p: &Program, b: &Binding) -> Result<Vec<Obligation>, ObligationError> {
    let cls = crate::lang::classify(p);
    let mut out = Vec::new();
    for wp in cls.weight_bearing() {
        let w = b
            .weights
            .at_path(wp)
            .ok_or_else(|| ObligationError::MissingWeight(wp.clone()))?;
        let lhs = lhs_of(w);
        let root = p.main.body.at_path(wp).expect("classified path exists");
        for (rel, c) in root.occurrences() {
            let CommandKind::Assign { target, expr } = &c.kind else {
                continue;
            };
            let path = CmdPath(wp.0.iter().chain(rel.0.iter()).copied().collect());
            let mut items: Vec<(ObligationKind, &Expression)> = Vec::new();
            if let Some(i) = p.main.index_of(target) {
                items.push((
                    ObligationKind::AssignTarget {
                        index: i,
                        attribute: target.clone(),
                    },
                    expr,
                ));
            }
            let mut calls = Vec::new();
            expr.walk(&mut |x| {
                if let Expression::Call { receiver, .. } = x {
                    calls.push((receiver.clone(), x));
                }
            });
            for (r, call) in calls {
                if let Some(j) = p.main.index_of(&r) {
                    items.push((ObligationKind::CallSideEffect { index: j, receiver: r }, call));
                }
            }
            for (kind, e) in items {
                let index = match &kind {
                    ObligationKind::AssignTarget { index, .. } | ObligationKind::CallSideEffect { index, .. } => *index,
                };
                let theta = partial_assignment(e, &b.assignment).map_err(ObligationError::MissingSupInterpretation)?;
                let rhs = w.body.compose(&w.formals[index], &theta);
                out.push(Obligation {
                    label: w.label.clone(),
                    weight_path: wp.clone(),
                    temporal: w.temporal.clone(),
                    position: index,
                    substituted: theta,
                    lhs: lhs.clone(),
                    rhs,
                    provenance: vec![Provenance {
                        kind,
                        path: path.clone(),
                        span: c.span,
                        expression: print_expr(e),
                    }],
                });
            }
        }
    }
    Ok(out)
}

/// Obligations with syntactically identical inequalities merged.
pub fn dedup(raw: Vec<Obligation>) -> Vec<Obligation> {
    let mut out: Vec<Obligation> = Vec::new();
    let mut index: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for o in raw {
        let key = (o.label.clone(), o.lhs.to_string(), o.rhs.to_string());
        match index.get(&key) {
            Some(&i) => out[i].provenance.extend(o.provenance),
            None => {
                index.insert(key, out.len());
                out.push(o);
            }
        }
    }
    out
}

pub fn generate_obligations(p: &Program, b: &Binding) -> Result<Vec<Obligation>, ObligationError> {
    generate_obligations_raw(p, b).map(dedup)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckedObligation {
    #[serde(flatten)]
    pub obligation: Obligation,
    pub verdict: CompareVerdict,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Overall {
    Brotherly,
    NotBrotherly { reasons: Vec<String> },
    Inconclusive { unknowns: Vec<String> },
}

impl Overall {
    pub fn name(&self) -> &'static str {
        match self {
            Overall::Brotherly => "brotherly",
            Overall::NotBrotherly { .. } => "not_brotherly",
            Overall::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BrotherlyReport {
    pub overall: Overall,
    pub obligations: Vec<CheckedObligation>,
    pub audit: Audit,
    pub warnings: Vec<String>,
    /// What a brotherly verdict guarantees; absent otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    pub compare: CompareConfig,
}

#[derive(Debug, Clone, thiserror::Error, Serialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum CheckError {
    #[error("{0}")]
    Bind(BindErrors),
    #[error("{0}")]
    Obligations(ObligationError),
}

pub fn check_binding(p: &Program, b: &Binding, cfg: &CompareConfig) -> Result<BrotherlyReport, ObligationError> {
    let obligations = generate_obligations(p, b)?;
    let checked: Vec<CheckedObligation> = obligations
        .into_iter()
        .map(|o| {
            let verdict = compare_geq(&o.lhs, &o.rhs, cfg);
            CheckedObligation { obligation: o, verdict }
        })
        .collect();

    let mut reasons = Vec::new();
    let mut unknowns = Vec::new();
    for a in b.audit.additivity.iter().filter(|a| !a.additive) {
        reasons.push(format!("class entry `{}` is not additive", a.class));
    }
    for s in &b.audit.subterm {
        match &s.verdict {
            CompareVerdict::Verified => {}
            CompareVerdict::Falsified(w) => reasons.push(format!(
                "weight `{}` lacks the subterm property for `{}` at {} ({} < {})",
                s.label,
                s.formal,
                render_point(&w.point),
                w.lhs,
                w.rhs
            )),
            CompareVerdict::Unknown => unknowns.push(format!("subterm property of `{}` for `{}`", s.label, s.formal)),
        }
    }
    for c in &checked {
        match &c.verdict {
            CompareVerdict::Verified => {}
            CompareVerdict::Falsified(w) => reasons.push(format!(
                "obligation {} fails at {} ({} < {})",
                c.obligation.render(),
                render_point(&w.point),
                w.lhs,
                w.rhs
            )),
            CompareVerdict::Unknown => unknowns.push(format!("obligation {}", c.obligation.render())),
        }
    }
    let overall = if !reasons.is_empty() {
        Overall::NotBrotherly { reasons }
    } else if !unknowns.is_empty() {
        Overall::Inconclusive { unknowns }
    } else {
        Overall::Brotherly
    };
    let claim = matches!(overall, Overall::Brotherly).then(|| {
        "final attribute sizes of main are bounded by a polynomial in the initial attribute sizes".to_string()
    });
    Ok(BrotherlyReport {
        overall,
        obligations: checked,
        audit: b.audit.clone(),
        warnings: b.warnings.clone(),
        claim,
        compare: cfg.clone(),
    })
}

/// Binds the annotations and checks every obligation.
pub fn check_brotherly(p: &Program, ann: &AnnotationSet, cfg: &CompareConfig) -> Result<BrotherlyReport, CheckError> {
    let b = bind_lenient(ann, p, cfg).map_err(CheckError::Bind)?;
    check_binding(p, &b, cfg).map_err(CheckError::Obligations)
}

pub fn render_point(p: &Point) -> String {
    let parts: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.join(", ")
}

/// One evaluation of an obligation at a recorded run state.
#[derive(Debug, Clone, Serialize)]
pub struct TraceCheck {
    pub obligation: usize,
    pub step: u64,
    #[serde(serialize_with = "crate::maxpoly::expr::serde_rat::rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "crate::maxpoly::expr::serde_rat::rational")]
    pub rhs: Rational,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TraceAudit {
    pub checked: usize,
    pub violations: Vec<TraceCheck>,
}

/// Re-evaluates each obligation at the store before every execution of
/// its assignment in `trace` (recorded with values), with the temporal
/// variable set to the iterations still to run.
pub fn audit_trace(
    obligations: &[Obligation],
    b: &Binding,
    attributes: &[String],
    trace: &Trace,
) -> Result<TraceAudit, UndefinedSymbol> {
    let mut audit = TraceAudit::default();
    for ev in &trace.events {
        let Some(pre) = &ev.pre else { continue };
        let mut point: Option<Point> = None;
        for (k, o) in obligations.iter().enumerate() {
            if !o.provenance.iter().any(|pv| pv.path == ev.path) {
                continue;
            }
            let mut at = match &point {
                Some(p) => p.clone(),
                None => {
                    let mut p = Point::new();
                    for (a, v) in attributes.iter().zip(pre) {
                        p.insert(a.clone(), b.assignment.ground(v)?);
                    }
                    point = Some(p.clone());
                    p
                }
            };
            if let Some(t) = &o.temporal {
                let Some(mark) = ev.loops.iter().find(|m| m.path == o.weight_path) else {
                    continue;
                };
                at.insert(t.clone(), Rational::from_integer(mark.remaining().into()));
            }
            let lhs = o.lhs.eval(&at).expect("obligation variables are bound");
            let rhs = o.rhs.eval(&at).expect("obligation variables are bound");
            audit.checked += 1;
            if lhs < rhs {
                audit.violations.push(TraceCheck {
                    obligation: k,
                    step: ev.step,
                    lhs,
                    rhs,
                });
            }
        }
    }
    Ok(audit)
}
