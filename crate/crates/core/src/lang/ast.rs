//! Abstract syntax of the object language.
//!
//! A program is a list of classes plus a distinguished `main` class holding
//! attribute declarations and a single top-level command. Values are
//! constructor trees; there are no references, no inheritance and no
//! recursion.

use std::fmt;

use serde::Serialize;

/// Source position of a syntax node.
///
/// Spans never take part in structural equality: two programs that differ
/// only in layout compare equal, which is what the printer round-trip relies
/// on.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Expression {
    /// Method parameter `x`.
    Param(String),
    /// Attribute `X` of the current class.
    Attr(String),
    /// `X.f(e1, ..., en)`; the receiver is always an attribute.
    Call {
        receiver: String,
        method: String,
        args: Vec<Expression>,
    },
    /// `new C(e1, ..., en)`.
    New { class: String, args: Vec<Expression> },
}

impl Expression {
    pub fn attr(name: impl Into<String>) -> Self {
        Expression::Attr(name.into())
    }

    pub fn param(name: impl Into<String>) -> Self {
        Expression::Param(name.into())
    }

    pub fn call(receiver: impl Into<String>, method: impl Into<String>, args: Vec<Expression>) -> Self {
        Expression::Call {
            receiver: receiver.into(),
            method: method.into(),
            args,
        }
    }

    pub fn new_object(class: impl Into<String>, args: Vec<Expression>) -> Self {
        Expression::New {
            class: class.into(),
            args,
        }
    }

    pub fn args(&self) -> &[Expression] {
        match self {
            Expression::Call { args, .. } | Expression::New { args, .. } => args,
            _ => &[],
        }
    }

    pub fn contains_call(&self) -> bool {
        match self {
            Expression::Call { .. } => true,
            Expression::New { args, .. } => args.iter().any(Expression::contains_call),
            _ => false,
        }
    }

    /// Visits every sub-expression, outermost first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expression)) {
        f(self);
        for a in self.args() {
            a.walk(f);
        }
    }

    /// Attributes read by this expression, receivers included.
    pub fn attributes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| match e {
            Expression::Attr(a) => out.push(a.as_str()),
            Expression::Call { receiver, .. } => out.push(receiver.as_str()),
            _ => {}
        });
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CommandKind {
    Skip,
    Assign { target: String, expr: Expression },
    /// Always at least two elements, none of which is itself a `Seq`.
    Seq(Vec<Command>),
    Loop { attr: String, body: Box<Command> },
    If {
        guard: Expression,
        then_branch: Box<Command>,
        else_branch: Box<Command>,
    },
    While { guard: Expression, body: Box<Command> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Command {
    pub label: Option<String>,
    pub kind: CommandKind,
    pub span: Span,
}

impl Command {
    pub fn new(kind: CommandKind) -> Self {
        Command {
            label: None,
            kind,
            span: Span::default(),
        }
    }

    pub fn skip() -> Self {
        Command::new(CommandKind::Skip)
    }

    pub fn assign(target: impl Into<String>, expr: Expression) -> Self {
        Command::new(CommandKind::Assign {
            target: target.into(),
            expr,
        })
    }

    pub fn loop_over(attr: impl Into<String>, body: Command) -> Self {
        Command::new(CommandKind::Loop {
            attr: attr.into(),
            body: Box::new(body),
        })
    }

    pub fn while_loop(guard: Expression, body: Command) -> Self {
        Command::new(CommandKind::While {
            guard,
            body: Box::new(body),
        })
    }

    pub fn if_else(guard: Expression, then_branch: Command, else_branch: Command) -> Self {
        Command::new(CommandKind::If {
            guard,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        })
    }

    /// Builds a sequence, splicing nested sequences and dropping the wrapper
    /// for zero or one element.
    pub fn seq(items: impl IntoIterator<Item = Command>) -> Self {
        let mut flat = Vec::new();
        for c in items {
            match c.kind {
                CommandKind::Seq(inner) if c.label.is_none() => flat.extend(inner),
                _ => flat.push(c),
            }
        }
        match flat.len() {
            0 => Command::skip(),
            1 => flat.pop().unwrap(),
            _ => Command::new(CommandKind::Seq(flat)),
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn at(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    /// Direct sub-commands in occurrence order.
    pub fn children(&self) -> Vec<&Command> {
        match &self.kind {
            CommandKind::Skip | CommandKind::Assign { .. } => vec![],
            CommandKind::Seq(items) => items.iter().collect(),
            CommandKind::Loop { body, .. } | CommandKind::While { body, .. } => vec![body],
            CommandKind::If {
                then_branch,
                else_branch,
                ..
            } => vec![then_branch, else_branch],
        }
    }

    /// Pre-order traversal with occurrence paths relative to `self`.
    pub fn occurrences(&self) -> Vec<(CmdPath, &Command)> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Command, path: &mut Vec<u32>, out: &mut Vec<(CmdPath, &'a Command)>) {
            out.push((CmdPath(path.clone()), c));
            for (i, ch) in c.children().into_iter().enumerate() {
                path.push(i as u32);
                go(ch, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every expression of the command tree, guards included.
    pub fn expressions(&self) -> Vec<&Expression> {
        let mut out = Vec::new();
        for (_, c) in self.occurrences() {
            match &c.kind {
                CommandKind::Assign { expr, .. } => out.push(expr),
                CommandKind::If { guard, .. } | CommandKind::While { guard, .. } => out.push(guard),
                _ => {}
            }
        }
        out
    }

    /// Every attribute name read or written anywhere below this command.
    pub fn mentioned_attributes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for (_, c) in self.occurrences() {
            match &c.kind {
                CommandKind::Assign { target, expr } => {
                    out.push(target.as_str());
                    out.extend(expr.attributes());
                }
                CommandKind::Loop { attr, .. } => out.push(attr.as_str()),
                CommandKind::If { guard, .. } | CommandKind::While { guard, .. } => {
                    out.extend(guard.attributes())
                }
                _ => {}
            }
        }
        out
    }

    /// Names of all methods called below this command.
    pub fn called_methods(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for e in self.expressions() {
            e.walk(&mut |x| {
                if let Expression::Call { method, .. } = x {
                    out.push(method.as_str());
                }
            });
        }
        out
    }

    /// Names of all classes instantiated below this command.
    pub fn instantiated_classes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for e in self.expressions() {
            e.walk(&mut |x| {
                if let Expression::New { class, .. } = x {
                    out.push(class.as_str());
                }
            });
        }
        out
    }

    pub fn at_path(&self, path: &CmdPath) -> Option<&Command> {
        let mut cur = self;
        for &i in &path.0 {
            cur = *cur.children().get(i as usize)?;
        }
        Some(cur)
    }
}

/// Identity of a command occurrence: child indices from the root command.
///
/// Sequence elements are numbered left to right; `loop`/`while` bodies are
/// child 0; `if` branches are children 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct CmdPath(pub Vec<u32>);

impl CmdPath {
    pub fn root() -> Self {
        CmdPath(Vec::new())
    }

    /// `self ⊑ other`: `self` is `other` or lies below it.
    pub fn is_below_or_eq(&self, other: &CmdPath) -> bool {
        self.0.starts_with(&other.0)
    }

    pub fn child(&self, i: u32) -> CmdPath {
        let mut v = self.0.clone();
        v.push(i);
        CmdPath(v)
    }
}

impl fmt::Display for CmdPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Command,
    pub result_attr: String,
    pub span: Span,
}

/// A constructor written out in source. When absent the constructor is
/// implicit: `C(x1..xn) { X1 := x1; ...; Xn := xn }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructorDef {
    pub params: Vec<String>,
    pub body: Command,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDef {
    pub name: String,
    pub attributes: Vec<String>,
    pub constructors: Vec<ConstructorDef>,
    pub methods: Vec<MethodDef>,
    pub span: Span,
}

impl ClassDef {
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn method(&self, name: &str) -> Option<&MethodDef> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MainDef {
    pub attributes: Vec<String>,
    pub body: Command,
    pub span: Span,
}

impl MainDef {
    pub fn index_of(&self, attr: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == attr)
    }
}

/// How naturals are encoded as constructor terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NumeralScheme {
    /// `S^n(zero)`.
    Unary { succ: String, zero: String },
    /// Least significant digit outermost: `val(d0(w)) = 2 val(w)`,
    /// `val(d1(w)) = 2 val(w) + 1`, `val(end) = 0`.
    Binary {
        digit0: String,
        digit1: String,
        end: String,
    },
}

impl Default for NumeralScheme {
    fn default() -> Self {
        NumeralScheme::Unary {
            succ: "S".into(),
            zero: "eps".into(),
        }
    }
}

impl NumeralScheme {
    pub fn default_binary() -> Self {
        NumeralScheme::Binary {
            digit0: "B0".into(),
            digit1: "B1".into(),
            end: "eps".into(),
        }
    }

    /// Numeral constructors with their arities.
    pub fn constructors(&self) -> Vec<(&str, usize)> {
        match self {
            NumeralScheme::Unary { succ, zero } => vec![(succ, 1), (zero, 0)],
            NumeralScheme::Binary {
                digit0,
                digit1,
                end,
            } => vec![(digit0, 1), (digit1, 1), (end, 0)],
        }
    }

    pub fn zero_symbol(&self) -> &str {
        match self {
            NumeralScheme::Unary { zero, .. } => zero,
            NumeralScheme::Binary { end, .. } => end,
        }
    }
}

/// Name of the primitive addition on numerals. Programs may call it without
/// defining it; a user method of the same name takes precedence.
pub const BUILTIN_ADD: &str = "add";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Program {
    pub classes: Vec<ClassDef>,
    pub main: MainDef,
    pub numerals: NumeralScheme,
}

/// What a method name resolves to.
#[derive(Debug, Clone, Copy)]
pub enum MethodRef<'a> {
    User(&'a ClassDef, &'a MethodDef),
    BuiltinAdd,
}

impl<'a> MethodRef<'a> {
    pub fn arity(&self) -> usize {
        match self {
            MethodRef::User(_, m) => m.params.len(),
            MethodRef::BuiltinAdd => 1,
        }
    }
}

impl Program {
    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Arity of a class, counting the numeral constructors, which exist even
    /// when the source does not declare them.
    pub fn class_arity(&self, name: &str) -> Option<usize> {
        if let Some(c) = self.class(name) {
            return Some(c.arity());
        }
        self.numerals
            .constructors()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, a)| a)
    }

    /// All constructor symbols with their arities: declared classes first,
    /// then implicit numeral constructors.
    pub fn constructors(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> =
            self.classes.iter().map(|c| (c.name.clone(), c.arity())).collect();
        for (n, a) in self.numerals.constructors() {
            if self.class(n).is_none() {
                out.push((n.to_string(), a));
            }
        }
        out
    }

    pub fn method(&self, name: &str) -> Option<MethodRef<'_>> {
        for c in &self.classes {
            if let Some(m) = c.method(name) {
                return Some(MethodRef::User(c, m));
            }
        }
        if name == BUILTIN_ADD {
            return Some(MethodRef::BuiltinAdd);
        }
        None
    }

    /// Every labeled command of the program, methods included.
    pub fn labels(&self) -> Vec<(&str, &Command)> {
        let mut out = Vec::new();
        let mut bodies: Vec<&Command> = vec![&self.main.body];
        for c in &self.classes {
            bodies.extend(c.constructors.iter().map(|k| &k.body));
            bodies.extend(c.methods.iter().map(|m| &m.body));
        }
        for b in bodies {
            for (_, c) in b.occurrences() {
                if let Some(l) = &c.label {
                    out.push((l.as_str(), c));
                }
            }
        }
        out
    }
}
