//! Rewrites nested method calls into sequences of outermost calls.
//!
//! `X := V.f(U.g(X))` becomes `_f0 := U.g(X); X := V.f(_f0)`, with `_f0` a
//! fresh attribute of `main`. Arguments that read attributes and sit to the
//! left of a hoisted call are snapshotted too, so the left-to-right
//! evaluation order of the original is kept.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Command, CommandKind, Expression, Program};

/// Prefix of attributes introduced by [`flatten`].
pub const FRESH_PREFIX: &str = "_f";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlattenError {
    /// Fresh attributes can only be added to `main`: adding one to another
    /// class would change the arity of its objects.
    #[error("method `{class}.{method}` contains a nested call; only main can be flattened")]
    NestedCallInMethod { class: String, method: String },
}

struct Fresh {
    taken: BTreeSet<String>,
    next: usize,
    created: Vec<String>,
}

impl Fresh {
    fn new(p: &Program) -> Self {
        let mut taken: BTreeSet<String> = p.main.attributes.iter().cloned().collect();
        for c in &p.classes {
            taken.insert(c.name.clone());
            taken.extend(c.attributes.iter().cloned());
            for m in &c.methods {
                taken.insert(m.name.clone());
                taken.extend(m.params.iter().cloned());
            }
        }
        Fresh {
            taken,
            next: 0,
            created: Vec::new(),
        }
    }

    fn take(&mut self) -> String {
        loop {
            let name = format!("{FRESH_PREFIX}{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                self.created.push(name.clone());
                return name;
            }
        }
    }
}

fn needs_flattening(e: &Expression) -> bool {
    e.args().iter().any(Expression::contains_call)
}

/// Rewrites the arguments of `e` so that none contains a call, pushing the
/// hoisted assignments onto `pre` in evaluation order.
fn flatten_args(e: Expression, fresh: &mut Fresh, pre: &mut Vec<Command>) -> Expression {
    let (args, rebuild): (Vec<Expression>, Box<dyn FnOnce(Vec<Expression>) -> Expression>) = match e {
        Expression::Call {
            receiver,
            method,
            args,
        } => (
            args,
            Box::new(move |a| Expression::Call {
                receiver,
                method,
                args: a,
            }),
        ),
        Expression::New { class, args } => (args, Box::new(move |a| Expression::New { class, args: a })),
        other => return other,
    };
    let last_call = args.iter().rposition(Expression::contains_call);
    let Some(last_call) = last_call else {
        return rebuild(args);
    };
    let mut out = Vec::with_capacity(args.len());
    for (i, a) in args.into_iter().enumerate() {
        if i > last_call {
            out.push(a);
            continue;
        }
        if i == last_call && matches!(a, Expression::New { .. }) {
            out.push(flatten_args(a, fresh, pre));
        } else if a.contains_call() || !a.attributes().is_empty() {
            // The argument value is needed after later calls ran: hoist it.
            let inner = hoist_value(a, fresh, pre);
            out.push(inner);
        } else {
            out.push(a);
        }
    }
    rebuild(out)
}

/// Evaluates `e` into a fresh attribute (after flattening its arguments) and
/// returns the attribute reference.
fn hoist_value(e: Expression, fresh: &mut Fresh, pre: &mut Vec<Command>) -> Expression {
    let e = flatten_args(e, fresh, pre);
    let t = fresh.take();
    pre.push(Command::assign(t.clone(), e));
    Expression::Attr(t)
}

/// Rewrites a guard so that it contains no call.
fn flatten_guard(g: Expression, fresh: &mut Fresh, pre: &mut Vec<Command>) -> Expression {
    if !g.contains_call() {
        return g;
    }
    match g {
        Expression::Call { .. } => hoist_value(g, fresh, pre),
        Expression::New { class, args } => {
            let wrapped = Expression::New { class, args };
            flatten_args(wrapped, fresh, pre)
        }
        other => other,
    }
}

fn flatten_cmd(c: Command, fresh: &mut Fresh) -> Command {
    let Command { label, kind, span } = c;
    let rebuilt = match kind {
        CommandKind::Skip => CommandKind::Skip,
        CommandKind::Assign { target, expr } => {
            if needs_flattening(&expr) {
                let mut pre = Vec::new();
                let expr = flatten_args(expr, fresh, &mut pre);
                pre.push(Command {
                    label,
                    kind: CommandKind::Assign { target, expr },
                    span,
                });
                return Command::seq(pre);
            }
            CommandKind::Assign { target, expr }
        }
        CommandKind::Seq(items) => {
            return Command::seq(items.into_iter().map(|i| flatten_cmd(i, fresh)));
        }
        CommandKind::Loop { attr, body } => CommandKind::Loop {
            attr,
            body: Box::new(flatten_cmd(*body, fresh)),
        },
        CommandKind::If {
            guard,
            then_branch,
            else_branch,
        } => {
            let mut pre = Vec::new();
            let guard = flatten_guard(guard, fresh, &mut pre);
            let cmd = Command {
                label,
                kind: CommandKind::If {
                    guard,
                    then_branch: Box::new(flatten_cmd(*then_branch, fresh)),
                    else_branch: Box::new(flatten_cmd(*else_branch, fresh)),
                },
                span,
            };
            pre.push(cmd);
            return Command::seq(pre);
        }
        CommandKind::While { guard, body } => {
            let mut pre = Vec::new();
            let guard = flatten_guard(guard, fresh, &mut pre);
            let body = flatten_cmd(*body, fresh);
            // The guard is re-evaluated after every iteration.
            let body = match body.kind {
                CommandKind::Skip if !pre.is_empty() => Command::seq(pre.iter().cloned()),
                _ => Command::seq(std::iter::once(body).chain(pre.iter().cloned())),
            };
            pre.push(Command {
                label,
                kind: CommandKind::While {
                    guard,
                    body: Box::new(body),
                },
                span,
            });
            return Command::seq(pre);
        }
    };
    Command {
        label,
        kind: rebuilt,
        span,
    }
}

/// Returns an equivalent program in which every call is outermost and no
/// guard contains a call. Already-flat programs are returned unchanged.
pub fn flatten(p: &Program) -> Result<Program, FlattenError> {
    for c in &p.classes {
        for m in &c.methods {
            if m.body.expressions().iter().any(|e| needs_flattening(e))
                || m.body.occurrences().iter().any(|(_, c)| match &c.kind {
                    CommandKind::If { guard, .. } | CommandKind::While { guard, .. } => {
                        guard.contains_call()
                    }
                    _ => false,
                })
            {
                return Err(FlattenError::NestedCallInMethod {
                    class: c.name.clone(),
                    method: m.name.clone(),
                });
            }
        }
    }
    let mut fresh = Fresh::new(p);
    let mut out = p.clone();
    out.main.body = flatten_cmd(p.main.body.clone(), &mut fresh);
    out.main.attributes.extend(fresh.created);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::wellformed::{well_formed, Rule};
    use crate::parser::{parse_program, pretty_print};

    #[test]
    fn single_nested_call() {
        let p = parse_program("Class main { var X; var U; var V; X := V.add(U.add(X)) }", "t").unwrap();
        let f = flatten(&p).unwrap();
        let expected = parse_program(
            "Class main { var X; var U; var V; var _f0; _f0 := U.add(X); X := V.add(_f0) }",
            "t",
        )
        .unwrap();
        assert_eq!(f, expected, "{}", pretty_print(&f));
        assert_eq!(well_formed(&f).count(Rule::NonOutermostCall), 0);
    }

    #[test]
    fn double_nesting_yields_three_commands() {
        let p = parse_program(
            "Class main { var X; var U; var V; var W; var Z; X := V.add(U.add(W.add(Z))) }",
            "t",
        )
        .unwrap();
        let f = flatten(&p).unwrap();
        let CommandKind::Seq(items) = &f.main.body.kind else {
            panic!("expected a sequence");
        };
        assert_eq!(items.len(), 3);
        assert_eq!(f.main.attributes.len(), 7);
        assert!(well_formed(&f).is_empty());
    }

    #[test]
    fn flat_program_unchanged() {
        let p = parse_program(crate::fixtures::POSITION_OO, "position.oo").unwrap();
        assert_eq!(flatten(&p).unwrap(), p);
    }

    #[test]
    fn earlier_sibling_is_snapshotted() {
        let p = parse_program("Class main { var X; var U; var V; X := V.add2(U, U.add(X)) }", "t");
        // add2 is unknown but flattening is purely syntactic.
        let p = p.unwrap();
        let f = flatten(&p).unwrap();
        let expected = parse_program(
            "Class main { var X; var U; var V; var _f0; var _f1; \
             _f0 := U; _f1 := U.add(X); X := V.add2(_f0, _f1) }",
            "t",
        )
        .unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let p = parse_program("Class main { var _f0; var U; _f0 := U.add(U.add(U)) }", "t").unwrap();
        let f = flatten(&p).unwrap();
        assert_eq!(f.main.attributes, vec!["_f0", "U", "_f1"]);
    }

    #[test]
    fn while_guard_is_reevaluated() {
        let p = parse_program("Class main { var X; var U; while U.add(X) { skip } }", "t").unwrap();
        let f = flatten(&p).unwrap();
        let expected = parse_program(
            "Class main { var X; var U; var _f0; _f0 := U.add(X); while _f0 { _f0 := U.add(X) } }",
            "t",
        )
        .unwrap();
        assert_eq!(f, expected, "{}", pretty_print(&f));
    }

    #[test]
    fn nested_call_in_method_is_rejected() {
        let src = "Class C { var A; var B; f() { A := A.add(B.add(A)); return A; } } Class main { var X; skip }";
        let p = parse_program(src, "t").unwrap();
        assert!(matches!(flatten(&p), Err(FlattenError::NestedCallInMethod { .. })));
    }
}
