use std::fmt::Write;

use crate::lang::ast::*;

const INDENT: &str = "    ";

pub fn print_expr(e: &Expression) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_args(out: &mut String, args: &[Expression]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn write_expr(out: &mut String, e: &Expression) {
    match e {
        Expression::Param(x) | Expression::Attr(x) => out.push_str(x),
        Expression::Call {
            receiver,
            method,
            args,
        } => {
            let _ = write!(out, "{receiver}.{method}");
            write_args(out, args);
        }
        Expression::New { class, args } => {
            let _ = write!(out, "new {class}");
            write_args(out, args);
        }
    }
}

fn write_commands(out: &mut String, c: &Command, depth: usize) {
    let items: Vec<&Command> = match &c.kind {
        CommandKind::Seq(items) => items.iter().collect(),
        _ => vec![c],
    };
    for (i, item) in items.iter().enumerate() {
        write_command(out, item, depth);
        if i + 1 < items.len() {
            out.push(';');
        }
        out.push('\n');
    }
}

fn write_block(out: &mut String, c: &Command, depth: usize) {
    out.push_str("{\n");
    write_commands(out, c, depth + 1);
    out.push_str(&INDENT.repeat(depth));
    out.push('}');
}

fn write_command(out: &mut String, c: &Command, depth: usize) {
    out.push_str(&INDENT.repeat(depth));
    if let Some(l) = &c.label {
        let _ = write!(out, "{l}: ");
    }
    match &c.kind {
        CommandKind::Skip => out.push_str("skip"),
        CommandKind::Assign { target, expr } => {
            let _ = write!(out, "{target} := ");
            write_expr(out, expr);
        }
        CommandKind::Seq(_) => unreachable!("sequences are printed by write_commands"),
        CommandKind::Loop { attr, body } => {
            let _ = write!(out, "loop {attr} ");
            write_block(out, body, depth);
        }
        CommandKind::While { guard, body } => {
            out.push_str("while ");
            write_expr(out, guard);
            out.push(' ');
            write_block(out, body, depth);
        }
        CommandKind::If {
            guard,
            then_branch,
            else_branch,
        } => {
            out.push_str("if ");
            write_expr(out, guard);
            out.push(' ');
            write_block(out, then_branch, depth);
            out.push_str(" else ");
            write_block(out, else_branch, depth);
        }
    }
}

/// Renders a program in the concrete syntax accepted by
/// [`parse_program`](super::parse_program); parsing the output yields an
/// equal program.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    if p.numerals != NumeralScheme::default() {
        match &p.numerals {
            NumeralScheme::Unary { succ, zero } => {
                let _ = writeln!(out, "numerals unary({succ}, {zero});\n");
            }
            NumeralScheme::Binary {
                digit0,
                digit1,
                end,
            } => {
                let _ = writeln!(out, "numerals binary({digit0}, {digit1}, {end});\n");
            }
        }
    }
    for c in &p.classes {
        let _ = writeln!(out, "Class {} {{", c.name);
        for a in &c.attributes {
            let _ = writeln!(out, "{INDENT}var {a};");
        }
        for k in &c.constructors {
            let _ = writeln!(out, "{INDENT}{}({}) {{", c.name, k.params.join(", "));
            write_commands(&mut out, &k.body, 2);
            let _ = writeln!(out, "{INDENT}}}");
        }
        for m in &c.methods {
            let _ = writeln!(out, "{INDENT}{}({}) {{", m.name, m.params.join(", "));
            let mut body = String::new();
            write_commands(&mut body, &m.body, 2);
            // Terminate the last command before `return`.
            let body = body.trim_end_matches('\n');
            let _ = writeln!(out, "{body};");
            let _ = writeln!(out, "{INDENT}{INDENT}return {};", m.result_attr);
            let _ = writeln!(out, "{INDENT}}}");
        }
        out.push_str("}\n\n");
    }
    out.push_str("Class main {\n");
    for a in &p.main.attributes {
        let _ = writeln!(out, "{INDENT}var {a};");
    }
    write_commands(&mut out, &p.main.body, 1);
    out.push_str("}\n");
    out
}
