//! Recursive-descent parser for `.oo` program files.

use std::collections::BTreeSet;

use super::error::{ParseError, ParseErrorKind};
use super::lexer::{Cursor, Tok};
use crate::lang::ast::*;

pub const KEYWORDS: &[&str] = &[
    "Class", "var", "skip", "loop", "while", "if", "else", "new", "return", "main", "numerals",
];

struct Scope<'a> {
    params: &'a [String],
}

struct ProgramParser<'a> {
    cur: Cursor<'a>,
    labels: BTreeSet<String>,
}

impl<'a> ProgramParser<'a> {
    fn span(&self) -> Span {
        let (l, c) = self.cur.here();
        Span::new(l, c)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.cur.ident(KEYWORDS)
    }

    fn numerals(&mut self) -> Result<NumeralScheme, ParseError> {
        let scheme = if self.cur.eat_kw("unary") {
            if self.cur.eat_sym('(') {
                let succ = self.ident()?;
                self.cur.expect_sym(',')?;
                let zero = self.ident()?;
                self.cur.expect_sym(')')?;
                NumeralScheme::Unary { succ, zero }
            } else {
                NumeralScheme::default()
            }
        } else if self.cur.eat_kw("binary") {
            if self.cur.eat_sym('(') {
                let digit0 = self.ident()?;
                self.cur.expect_sym(',')?;
                let digit1 = self.ident()?;
                self.cur.expect_sym(',')?;
                let end = self.ident()?;
                self.cur.expect_sym(')')?;
                NumeralScheme::Binary {
                    digit0,
                    digit1,
                    end,
                }
            } else {
                NumeralScheme::default_binary()
            }
        } else {
            return Err(self.cur.unexpected(&["`unary`", "`binary`"]));
        };
        self.cur.expect_sym(';')?;
        Ok(scheme)
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut scheme = None;
        if self.cur.eat_kw("numerals") {
            scheme = Some(self.numerals()?);
        }
        let mut classes = Vec::new();
        let mut main: Option<MainDef> = None;
        while *self.cur.peek() != Tok::Eof {
            let span = self.span();
            self.cur.expect_kw("Class")?;
            if self.cur.eat_kw("main") {
                if main.is_some() {
                    return Err(self.cur.error(ParseErrorKind::Invalid(
                        "duplicate `Class main`".into(),
                    )));
                }
                main = Some(self.main_body(span)?);
            } else {
                classes.push(self.class(span)?);
            }
            self.cur.eat_sym(';');
        }
        let Some(main) = main else {
            return Err(self.cur.error(ParseErrorKind::Invalid("missing `Class main`".into())));
        };
        let numerals = match scheme {
            Some(s) => s,
            None => {
                let s = NumeralScheme::default();
                for (name, arity) in s.constructors() {
                    if let Some(c) = classes.iter().find(|c: &&ClassDef| c.name == name) {
                        if c.arity() != arity {
                            return Err(ParseError::new(
                                self.cur.origin,
                                c.span.line,
                                c.span.col,
                                ParseErrorKind::Invalid(format!(
                                    "class `{name}` does not fit the default unary numerals; \
                                     add a `numerals` pragma"
                                )),
                            ));
                        }
                    }
                }
                s
            }
        };
        Ok(Program {
            classes,
            main,
            numerals,
        })
    }

    fn attributes(&mut self) -> Result<Vec<String>, ParseError> {
        let mut attrs = Vec::new();
        while self.cur.eat_kw("var") {
            attrs.push(self.ident()?);
            self.cur.expect_sym(';')?;
        }
        Ok(attrs)
    }

    fn main_body(&mut self, span: Span) -> Result<MainDef, ParseError> {
        self.cur.expect_sym('{')?;
        let attributes = self.attributes()?;
        let body = self.commands(&Scope { params: &[] })?;
        self.cur.expect_sym('}')?;
        Ok(MainDef {
            attributes,
            body,
            span,
        })
    }

    fn class(&mut self, span: Span) -> Result<ClassDef, ParseError> {
        let name = self.ident()?;
        self.cur.expect_sym('{')?;
        let attributes = self.attributes()?;
        let mut constructors = Vec::new();
        let mut methods = Vec::new();
        while !self.cur.at_sym('}') {
            let mspan = self.span();
            let mname = self.ident()?;
            self.cur.expect_sym('(')?;
            let mut params = Vec::new();
            if !self.cur.at_sym(')') {
                loop {
                    params.push(self.ident()?);
                    if !self.cur.eat_sym(',') {
                        break;
                    }
                }
            }
            self.cur.expect_sym(')')?;
            self.cur.expect_sym('{')?;
            let scope = Scope { params: &params };
            if mname == name {
                let body = self.commands(&scope)?;
                self.cur.expect_sym('}')?;
                constructors.push(ConstructorDef {
                    params,
                    body,
                    span: mspan,
                });
            } else {
                let body = self.commands(&scope)?;
                self.cur.expect_kw("return")?;
                let result_attr = self.ident()?;
                self.cur.eat_sym(';');
                self.cur.expect_sym('}')?;
                methods.push(MethodDef {
                    name: mname,
                    params,
                    body,
                    result_attr,
                    span: mspan,
                });
            }
            self.cur.eat_sym(';');
        }
        self.cur.expect_sym('}')?;
        Ok(ClassDef {
            name,
            attributes,
            constructors,
            methods,
            span,
        })
    }

    /// `cmd (; cmd)* ;?`, possibly empty (meaning `skip`).
    fn commands(&mut self, scope: &Scope<'_>) -> Result<Command, ParseError> {
        let mut items = Vec::new();
        loop {
            if self.cur.at_sym('}') || self.cur.at_kw("return") || *self.cur.peek() == Tok::Eof {
                break;
            }
            items.push(self.command(scope)?);
            if !self.cur.eat_sym(';') {
                break;
            }
        }
        Ok(match items.len() {
            0 => Command::skip(),
            1 => items.pop().unwrap(),
            _ => Command::new(CommandKind::Seq(items)),
        })
    }

    fn block(&mut self, scope: &Scope<'_>) -> Result<Command, ParseError> {
        self.cur.expect_sym('{')?;
        let c = self.commands(scope)?;
        self.cur.expect_sym('}')?;
        Ok(c)
    }

    fn command(&mut self, scope: &Scope<'_>) -> Result<Command, ParseError> {
        let mut label = None;
        if let (Tok::Ident(l), Tok::Sym(':')) = (self.cur.peek().clone(), self.cur.peek_at(1).clone()) {
            if KEYWORDS.contains(&l.as_str()) {
                return Err(self.cur.unexpected(&["label", "command"]));
            }
            if !self.labels.insert(l.clone()) {
                return Err(self.cur.error(ParseErrorKind::Invalid(format!("duplicate label `{l}`"))));
            }
            self.cur.next();
            self.cur.next();
            label = Some(l);
        }
        let span = self.span();
        let kind = if self.cur.eat_kw("skip") {
            CommandKind::Skip
        } else if self.cur.eat_kw("loop") {
            let attr = self.ident()?;
            CommandKind::Loop {
                attr,
                body: Box::new(self.block(scope)?),
            }
        } else if self.cur.eat_kw("while") {
            let guard = self.expr(scope)?;
            CommandKind::While {
                guard,
                body: Box::new(self.block(scope)?),
            }
        } else if self.cur.eat_kw("if") {
            let guard = self.expr(scope)?;
            let then_branch = Box::new(self.block(scope)?);
            let else_branch = if self.cur.eat_kw("else") {
                Box::new(self.block(scope)?)
            } else {
                Box::new(Command::skip())
            };
            CommandKind::If {
                guard,
                then_branch,
                else_branch,
            }
        } else if matches!(self.cur.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            let target = self.ident()?;
            self.cur.expect_walrus()?;
            let expr = self.expr(scope)?;
            CommandKind::Assign { target, expr }
        } else {
            return Err(self.cur.unexpected(&["command"]));
        };
        Ok(Command { label, kind, span })
    }

    fn args(&mut self, scope: &Scope<'_>) -> Result<Vec<Expression>, ParseError> {
        self.cur.expect_sym('(')?;
        let mut args = Vec::new();
        if !self.cur.at_sym(')') {
            loop {
                args.push(self.expr(scope)?);
                if !self.cur.eat_sym(',') {
                    break;
                }
            }
        }
        self.cur.expect_sym(')')?;
        Ok(args)
    }

    fn expr(&mut self, scope: &Scope<'_>) -> Result<Expression, ParseError> {
        if self.cur.eat_kw("new") {
            let class = self.ident()?;
            let args = self.args(scope)?;
            return Ok(Expression::New { class, args });
        }
        let name = match self.cur.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.cur.unexpected(&["expression"])),
        };
        self.cur.next();
        if self.cur.eat_sym('.') {
            let method = self.ident()?;
            let args = self.args(scope)?;
            return Ok(Expression::Call {
                receiver: name,
                method,
                args,
            });
        }
        if scope.params.contains(&name) {
            Ok(Expression::Param(name))
        } else {
            Ok(Expression::Attr(name))
        }
    }
}

/// Parses a program file. `origin` names the source in error messages.
pub fn parse_program(src: &str, origin: &str) -> Result<Program, ParseError> {
    let mut p = ProgramParser {
        cur: Cursor::new(src, origin)?,
        labels: BTreeSet::new(),
    };
    p.program()
}

/// Parses one expression; names in `params` read as parameters, all others
/// as attributes.
pub fn parse_expression(src: &str, params: &[String]) -> Result<Expression, ParseError> {
    let mut p = ProgramParser {
        cur: Cursor::new(src, "<expr>")?,
        labels: BTreeSet::new(),
    };
    let e = p.expr(&Scope { params })?;
    if *p.cur.peek() != Tok::Eof {
        return Err(p.cur.unexpected(&["end of expression"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_program_shape() {
        let p = parse_program(crate::fixtures::POSITION_OO, "position.oo").unwrap();
        let names: Vec<&str> = p.classes.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["Position"]);
        assert_eq!(p.main.attributes, vec!["W", "U", "V", "Z"]);
        let labels: Vec<&str> = p.labels().into_iter().map(|(l, _)| l).collect();
        assert_eq!(labels, vec!["Cm1", "Cm2", "Cm3"]);
        let (_, cm1) = p.labels()[0];
        assert_eq!(
            cm1.kind,
            CommandKind::Assign {
                target: "V".into(),
                expr: Expression::new_object("Position", vec![Expression::attr("W"), Expression::attr("U")]),
            }
        );
        let pos = p.class("Position").unwrap();
        assert_eq!(pos.method("move").unwrap().params, vec!["x", "y"]);
        assert_eq!(pos.method("getX").unwrap().result_attr, "X");
        assert_eq!(p.numerals, NumeralScheme::default());
    }

    #[test]
    fn minimal_program() {
        let p = parse_program("Class main { var X; skip }", "t").unwrap();
        assert!(p.classes.is_empty());
        assert_eq!(p.main.attributes, vec!["X"]);
        assert_eq!(p.main.body, Command::skip());
    }

    #[test]
    fn missing_semicolon_after_attribute() {
        let err = parse_program("Class main {\n  var X\n  var Y;\n  skip\n}", "t").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { ref expected, .. } if expected == &["`;`"]));
    }

    #[test]
    fn params_resolve_before_attributes() {
        let src = "Class C { var A; f(a) { A := a; return A; } } Class main { var X; skip }";
        let p = parse_program(src, "t").unwrap();
        let body = &p.class("C").unwrap().method("f").unwrap().body;
        assert_eq!(body, &Command::assign("A", Expression::param("a")));
    }

    #[test]
    fn binary_pragma() {
        let p = parse_program("numerals binary(Z0, Z1, nil); Class main { var X; skip }", "t").unwrap();
        assert_eq!(
            p.numerals,
            NumeralScheme::Binary {
                digit0: "Z0".into(),
                digit1: "Z1".into(),
                end: "nil".into()
            }
        );
    }

    #[test]
    fn conflicting_numeral_class_needs_pragma() {
        let err = parse_program("Class S { var A; var B; } Class main { var X; skip }", "t").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Invalid(_)));
    }

    #[test]
    fn duplicate_label() {
        let err = parse_program("Class main { var X; L: skip; L: skip }", "t").unwrap_err();
        assert!(err.to_string().contains("duplicate label"));
    }

    #[test]
    fn missing_main() {
        assert!(parse_program("Class C { var A; }", "t").is_err());
    }
}
