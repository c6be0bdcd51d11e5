//! Syntactic restrictions a program must satisfy before analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::ast::{ClassDef, Command, CommandKind, Expression, Program, Span};
use super::precedence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Rule {
    NonOutermostCall,
    ImpureGuard,
    RecursionCycle,
    LoopVarViolation,
    NameClash,
    MalformedConstructor,
    MalformedNumeral,
    UnknownAttribute,
    UnknownMethod,
    UnknownClass,
    ArityMismatch,
    DuplicateParam,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    /// `main`, `Class.method` or `Class.<init>`.
    pub context: String,
    pub span: Span,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.context, self.span)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: Rule,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.rule, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.0.iter().filter(|d| d.rule == rule).count()
    }

    pub fn has_errors(&self) -> bool {
        self.0.iter().any(|d| d.severity == Severity::Error)
    }
}

struct Ctx<'a> {
    name: String,
    attributes: &'a [String],
    params: &'a [String],
}

struct Checker<'p> {
    p: &'p Program,
    out: Vec<Diagnostic>,
}

impl<'p> Checker<'p> {
    fn push(&mut self, rule: Rule, ctx: &str, span: Span, message: String) {
        self.out.push(Diagnostic {
            severity: Severity::Error,
            rule,
            location: Location {
                context: ctx.to_string(),
                span,
            },
            message,
        });
    }

    fn expr(&mut self, ctx: &Ctx<'_>, e: &Expression, span: Span, nested: bool) {
        match e {
            Expression::Param(x) => {
                if !ctx.params.contains(x) {
                    self.push(
                        Rule::UnknownAttribute,
                        &ctx.name,
                        span,
                        format!("`{x}` is neither a parameter nor an attribute here"),
                    );
                }
            }
            Expression::Attr(a) => self.attr(ctx, a, span),
            Expression::Call {
                receiver,
                method,
                args,
            } => {
                if nested {
                    self.push(
                        Rule::NonOutermostCall,
                        &ctx.name,
                        span,
                        format!("call `{receiver}.{method}(..)` is not in outermost position"),
                    );
                }
                self.attr(ctx, receiver, span);
                match self.p.method(method) {
                    None => self.push(
                        Rule::UnknownMethod,
                        &ctx.name,
                        span,
                        format!("unknown method `{method}`"),
                    ),
                    Some(m) if m.arity() != args.len() => self.push(
                        Rule::ArityMismatch,
                        &ctx.name,
                        span,
                        format!("`{method}` expects {} argument(s), got {}", m.arity(), args.len()),
                    ),
                    Some(_) => {}
                }
                for a in args {
                    self.expr(ctx, a, span, true);
                }
            }
            Expression::New { class, args } => {
                match self.p.class_arity(class) {
                    None => self.push(
                        Rule::UnknownClass,
                        &ctx.name,
                        span,
                        format!("unknown class `{class}`"),
                    ),
                    Some(n) if n != args.len() => self.push(
                        Rule::ArityMismatch,
                        &ctx.name,
                        span,
                        format!("class `{class}` has {n} attribute(s), got {} argument(s)", args.len()),
                    ),
                    Some(_) => {}
                }
                for a in args {
                    self.expr(ctx, a, span, true);
                }
            }
        }
    }

    fn attr(&mut self, ctx: &Ctx<'_>, a: &str, span: Span) {
        if !ctx.attributes.iter().any(|x| x == a) {
            self.push(
                Rule::UnknownAttribute,
                &ctx.name,
                span,
                format!("`{a}` is not an attribute of `{}`", ctx.name),
            );
        }
    }

    fn command(&mut self, ctx: &Ctx<'_>, c: &Command, prec: &precedence::Precedence) {
        for (_, cmd) in c.occurrences() {
            let span = cmd.span;
            match &cmd.kind {
                CommandKind::Skip | CommandKind::Seq(_) => {}
                CommandKind::Assign { target, expr } => {
                    self.attr(ctx, target, span);
                    self.expr(ctx, expr, span, false);
                }
                CommandKind::Loop { attr, body } => {
                    self.attr(ctx, attr, span);
                    self.loop_var(ctx, attr, body, span, prec);
                }
                CommandKind::If { guard, .. } | CommandKind::While { guard, .. } => {
                    if guard.contains_call() {
                        self.push(
                            Rule::ImpureGuard,
                            &ctx.name,
                            span,
                            "guard expression contains a method call".into(),
                        );
                    }
                    self.expr(ctx, guard, span, false);
                }
            }
        }
    }

    fn loop_var(
        &mut self,
        ctx: &Ctx<'_>,
        x: &str,
        body: &Command,
        span: Span,
        prec: &precedence::Precedence,
    ) {
        if body.mentioned_attributes().contains(&x) {
            self.push(
                Rule::LoopVarViolation,
                &ctx.name,
                span,
                format!("loop attribute `{x}` occurs in the loop body"),
            );
        }
        let mut reach = BTreeSet::new();
        for f in body.called_methods() {
            reach.extend(prec.reachable_from(f));
        }
        for f in reach {
            if let Some(super::ast::MethodRef::User(_, m)) = self.p.method(&f) {
                if m.result_attr == x || m.body.mentioned_attributes().contains(&x) {
                    self.push(
                        Rule::LoopVarViolation,
                        &ctx.name,
                        span,
                        format!("loop attribute `{x}` occurs in method `{f}` called from the loop body"),
                    );
                }
            }
        }
    }

    fn constructor(&mut self, c: &ClassDef) {
        let ctx = format!("{}.<init>", c.name);
        if c.constructors.len() > 1 {
            self.push(
                Rule::MalformedConstructor,
                &ctx,
                c.constructors[1].span,
                format!("class `{}` declares {} constructors", c.name, c.constructors.len()),
            );
        }
        let Some(k) = c.constructors.first() else {
            return;
        };
        let mut ok = k.params.len() == c.attributes.len();
        let assigns: Vec<&Command> = match &k.body.kind {
            CommandKind::Skip => vec![],
            CommandKind::Seq(items) => items.iter().collect(),
            _ => vec![&k.body],
        };
        ok &= assigns.len() == c.attributes.len();
        if ok {
            for ((cmd, attr), param) in assigns.iter().zip(&c.attributes).zip(&k.params) {
                match &cmd.kind {
                    CommandKind::Assign {
                        target,
                        expr: Expression::Param(x),
                    } if target == attr && x == param => {}
                    _ => ok = false,
                }
            }
        }
        if !ok {
            self.push(
                Rule::MalformedConstructor,
                &ctx,
                k.span,
                format!(
                    "constructor must have the shape {}({}) {{ {} }}",
                    c.name,
                    (1..=c.arity()).map(|i| format!("x{i}")).collect::<Vec<_>>().join(", "),
                    c.attributes
                        .iter()
                        .enumerate()
                        .map(|(i, a)| format!("{a} := x{}", i + 1))
                        .collect::<Vec<_>>()
                        .join("; ")
                ),
            );
        }
    }

    fn names(&mut self) {
        // Attribute owners, main included.
        let mut attr_owner: BTreeMap<&str, &str> = BTreeMap::new();
        let mut owners: Vec<(&str, &[String], Span)> = self
            .p
            .classes
            .iter()
            .map(|c| (c.name.as_str(), c.attributes.as_slice(), c.span))
            .collect();
        owners.push(("main", self.p.main.attributes.as_slice(), self.p.main.span));
        for (cls, attrs, span) in owners {
            for a in attrs {
                if let Some(prev) = attr_owner.insert(a, cls) {
                    self.push(
                        Rule::NameClash,
                        cls,
                        span,
                        format!("attribute `{a}` is declared in both `{prev}` and `{cls}`"),
                    );
                }
            }
        }
        let mut fn_owner: BTreeMap<&str, &str> = BTreeMap::new();
        for c in &self.p.classes {
            if let Some(prev) = fn_owner.insert(&c.name, &c.name) {
                self.push(
                    Rule::NameClash,
                    &c.name,
                    c.span,
                    format!("symbol `{}` is already defined by `{prev}`", c.name),
                );
            }
        }
        for c in &self.p.classes {
            for m in &c.methods {
                if let Some(prev) = fn_owner.insert(&m.name, &c.name) {
                    self.push(
                        Rule::NameClash,
                        &format!("{}.{}", c.name, m.name),
                        m.span,
                        format!("function symbol `{}` is already defined by `{prev}`", m.name),
                    );
                }
            }
        }
        for c in &self.p.classes {
            for (name, params, span) in c
                .methods
                .iter()
                .map(|m| (m.name.clone(), &m.params, m.span))
                .chain(c.constructors.iter().map(|k| ("<init>".to_string(), &k.params, k.span)))
            {
                let ctx = format!("{}.{}", c.name, name);
                let mut seen = BTreeSet::new();
                for x in params {
                    if !seen.insert(x) {
                        self.push(Rule::DuplicateParam, &ctx, span, format!("parameter `{x}` repeated"));
                    }
                    if attr_owner.contains_key(x.as_str()) {
                        self.push(
                            Rule::NameClash,
                            &ctx,
                            span,
                            format!("parameter `{x}` has the name of an attribute"),
                        );
                    }
                }
            }
        }
        for (n, a) in self.p.numerals.constructors() {
            if let Some(c) = self.p.class(n) {
                if c.arity() != a {
                    self.push(
                        Rule::MalformedNumeral,
                        &c.name,
                        c.span,
                        format!("numeral constructor `{n}` must have {a} attribute(s), has {}", c.arity()),
                    );
                }
            }
        }
    }
}

/// Checks every syntactic restriction of the language. Empty diagnostics
/// means the program is well formed.
pub fn well_formed(p: &Program) -> Diagnostics {
    let mut ck = Checker { p, out: Vec::new() };
    ck.names();
    let (prec, _) = precedence::build(p);
    for group in prec.cycles() {
        let span = p
            .method(&group[0])
            .and_then(|m| match m {
                super::ast::MethodRef::User(_, m) => Some(m.span),
                _ => None,
            })
            .unwrap_or_default();
        ck.push(
            Rule::RecursionCycle,
            &group[0],
            span,
            format!("recursive call cycle: {}", group.join(" -> ")),
        );
    }
    for c in &p.classes {
        ck.constructor(c);
        for k in &c.constructors {
            let ctx = Ctx {
                name: format!("{}.<init>", c.name),
                attributes: &c.attributes,
                params: &k.params,
            };
            ck.command(&ctx, &k.body, &prec);
        }
        for m in &c.methods {
            let ctx = Ctx {
                name: format!("{}.{}", c.name, m.name),
                attributes: &c.attributes,
                params: &m.params,
            };
            ck.command(&ctx, &m.body, &prec);
            if !c.attributes.contains(&m.result_attr) {
                ck.push(
                    Rule::UnknownAttribute,
                    &ctx.name,
                    m.span,
                    format!("returned attribute `{}` is not an attribute of `{}`", m.result_attr, c.name),
                );
            }
        }
    }
    let ctx = Ctx {
        name: "main".into(),
        attributes: &p.main.attributes,
        params: &[],
    };
    ck.command(&ctx, &p.main.body, &prec);
    Diagnostics(ck.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn diags(src: &str) -> Diagnostics {
        well_formed(&parse_program(src, "t").unwrap())
    }

    #[test]
    fn position_program_is_well_formed() {
        let p = parse_program(crate::fixtures::POSITION_OO, "position.oo").unwrap();
        let d = well_formed(&p);
        assert!(d.is_empty(), "{:?}", d);
    }

    #[test]
    fn loop_variable_in_body() {
        let d = diags("Class main { var X; var Y; loop X { X := X.add(Y) } }");
        assert_eq!(d.len(), 1, "{:?}", d);
        assert_eq!(d.count(Rule::LoopVarViolation), 1);
    }

    #[test]
    fn loop_variable_in_called_method() {
        let src = "Class C { var A; var B; \
                     peek() { B := A; return B; } \
                     run() { loop A { B := B.peek() }; return B; } } \
                   Class main { var X; skip }";
        let d = diags(src);
        assert_eq!(d.count(Rule::LoopVarViolation), 1, "{:?}", d);
    }

    #[test]
    fn nested_call() {
        let d = diags("Class main { var X; var U; var V; X := V.add(U.add(X)) }");
        assert_eq!(d.len(), 1, "{:?}", d);
        assert_eq!(d.count(Rule::NonOutermostCall), 1);
    }

    #[test]
    fn call_under_new_is_not_outermost() {
        let d = diags("Class main { var X; var U; X := new S(U.add(X)) }");
        assert_eq!(d.count(Rule::NonOutermostCall), 1);
    }

    #[test]
    fn impure_guard() {
        let d = diags("Class main { var X; var U; while U.add(X) { skip } }");
        assert_eq!(d.count(Rule::ImpureGuard), 1);
    }

    #[test]
    fn recursion() {
        let src = "Class C { var A; f() { A := A.f(); return A; } } Class main { var X; skip }";
        let d = diags(src);
        assert_eq!(d.count(Rule::RecursionCycle), 1, "{:?}", d);
    }

    #[test]
    fn cross_class_attribute_clash() {
        let src = "Class C { var X; } Class main { var X; skip }";
        assert_eq!(diags(src).count(Rule::NameClash), 1);
    }

    #[test]
    fn cross_class_method_clash() {
        let src = "Class C { var A; f() { skip; return A; } } \
                   Class D { var B; f() { skip; return B; } } Class main { var X; skip }";
        assert_eq!(diags(src).count(Rule::NameClash), 1);
    }

    #[test]
    fn malformed_constructor() {
        let src = "Class P { var A; var B; P(x, y) { A := y; B := x; } } Class main { var X; skip }";
        assert_eq!(diags(src).count(Rule::MalformedConstructor), 1);
        let ok = "Class P { var A; var B; P(x, y) { A := x; B := y; } } Class main { var X; skip }";
        assert!(diags(ok).is_empty());
    }

    #[test]
    fn unknown_references() {
        let d = diags("Class main { var X; X := new Nope(); X := Y; X := X.nope() }");
        assert_eq!(d.count(Rule::UnknownClass), 1);
        assert_eq!(d.count(Rule::UnknownAttribute), 1);
        assert_eq!(d.count(Rule::UnknownMethod), 1);
    }

    #[test]
    fn arity_mismatch() {
        let d = diags("Class main { var X; X := new S(); X := X.add(X, X) }");
        assert_eq!(d.count(Rule::ArityMismatch), 2);
    }

    #[test]
    fn method_attribute_must_belong_to_class() {
        let src = "Class C { var A; f() { A := X; return A; } } Class main { var X; skip }";
        assert_eq!(diags(src).count(Rule::UnknownAttribute), 1);
    }
}
