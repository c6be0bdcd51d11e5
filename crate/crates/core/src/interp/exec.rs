//! Call-by-value execution.

use std::rc::Rc;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use super::numeral::{guard_value, numeral_decode, wrap_unary, GuardValue, NotANumeral};
use super::numeral::{encoded_size, numeral_encode};
use super::trace::{Branch, EventKind, LoopMark, Trace, TraceEvent};
use super::value::ObjectValue;
use crate::lang::{CmdPath, Command, CommandKind, Expression, MethodRef, NumeralScheme, Program};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecConfig {
    /// Budget for method calls and while iterations.
    pub fuel: u64,
    /// Largest value size that may be built.
    pub max_size: u64,
    /// Fault when evaluating arguments changes the store.
    pub strict_args: bool,
    /// Keep pre-assignment stores in the trace.
    pub record_values: bool,
    /// Record per-command events.
    pub trace: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            fuel: 1_000_000,
            max_size: 2_000_000,
            strict_args: false,
            record_values: false,
            trace: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "fault", rename_all = "snake_case")]
pub enum RuntimeFault {
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("`{symbol}` expects {expected} arguments, got {found}")]
    ArityFault {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("method `{method}` of class `{expected}` called on a `{found}` value")]
    ReceiverMismatch {
        method: String,
        expected: String,
        found: String,
    },
    #[error("{0}")]
    NotANumeral(String),
    #[error("loop attribute `{0}` changed inside its loop")]
    LoopAttributeModified(String),
    #[error("argument evaluation changed the store")]
    ArgumentSideEffect,
    #[error("value of size {size} exceeds the limit {limit}")]
    SizeLimit { size: u64, limit: u64 },
}

impl From<NotANumeral> for RuntimeFault {
    fn from(e: NotANumeral) -> Self {
        RuntimeFault::NotANumeral(e.to_string())
    }
}

/// Attribute store of the current class plus parameter bindings.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Frame {
    pub attrs: IndexMap<String, ObjectValue>,
    pub params: IndexMap<String, ObjectValue>,
}

impl Frame {
    pub fn new(attrs: impl IntoIterator<Item = (String, ObjectValue)>) -> Self {
        Frame {
            attrs: attrs.into_iter().collect(),
            params: IndexMap::new(),
        }
    }

    /// Main store with every attribute set to the zero numeral, then
    /// overridden by `bindings`.
    pub fn for_main(p: &Program, bindings: impl IntoIterator<Item = (String, ObjectValue)>) -> Self {
        let zero = ObjectValue::leaf(p.numerals.zero_symbol());
        let mut f = Frame::new(p.main.attributes.iter().map(|a| (a.clone(), zero.clone())));
        for (k, v) in bindings {
            f.attrs.insert(k, v);
        }
        f
    }

    pub fn get(&self, attr: &str) -> Option<&ObjectValue> {
        self.attrs.get(attr)
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.attrs.values().map(ObjectValue::size).collect()
    }
}

struct Machine<'p> {
    prog: &'p Program,
    cfg: &'p ExecConfig,
    fuel: u64,
    trace: Trace,
    loops: Vec<LoopMark>,
    succ: Option<Rc<str>>,
    /// Recent unary sums. Holding them keeps their addresses unique, so a
    /// receiver chain that reaches one of them is known to be a numeral.
    known_unary: Vec<ObjectValue>,
}

impl<'p> Machine<'p> {
    fn new(prog: &'p Program, cfg: &'p ExecConfig) -> Self {
        let succ = match &prog.numerals {
            NumeralScheme::Unary { succ, .. } => Some(succ.as_str().into()),
            NumeralScheme::Binary { .. } => None,
        };
        Machine {
            prog,
            cfg,
            fuel: cfg.fuel,
            trace: Trace {
                attributes: prog.main.attributes.clone(),
                peak_sizes: vec![0; prog.main.attributes.len()],
                ..Trace::default()
            },
            loops: Vec::new(),
            succ,
            known_unary: Vec::new(),
        }
    }

    fn burn(&mut self) -> Result<(), RuntimeFault> {
        if self.fuel == 0 {
            return Err(RuntimeFault::FuelExhausted {
                steps: self.trace.steps,
            });
        }
        self.fuel -= 1;
        self.trace.steps += 1;
        Ok(())
    }

    fn check_size(&self, size: u64) -> Result<(), RuntimeFault> {
        if size > self.cfg.max_size {
            Err(RuntimeFault::SizeLimit {
                size,
                limit: self.cfg.max_size,
            })
        } else {
            Ok(())
        }
    }

    fn record(&mut self, frame: &Frame, path: &CmdPath, c: &Command, kind: EventKind, pre: Option<Vec<ObjectValue>>) {
        let sizes = frame.sizes();
        for (peak, s) in self.trace.peak_sizes.iter_mut().zip(&sizes) {
            *peak = (*peak).max(*s);
        }
        if self.cfg.trace {
            self.trace.events.push(TraceEvent {
                step: self.trace.steps,
                path: path.clone(),
                label: c.label.clone(),
                kind,
                sizes,
                loops: self.loops.clone(),
                pre,
            });
        }
    }

    fn eval_args(&mut self, args: &[Expression], frame: &mut Frame) -> Result<Vec<ObjectValue>, RuntimeFault> {
        let before = self.cfg.strict_args.then(|| frame.attrs.clone());
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            out.push(self.eval(a, frame)?);
        }
        if let Some(b) = before {
            if b != frame.attrs {
                return Err(RuntimeFault::ArgumentSideEffect);
            }
        }
        Ok(out)
    }

    fn eval(&mut self, e: &Expression, frame: &mut Frame) -> Result<ObjectValue, RuntimeFault> {
        match e {
            Expression::Param(x) => frame
                .params
                .get(x)
                .cloned()
                .ok_or_else(|| RuntimeFault::Unbound(x.clone())),
            Expression::Attr(x) => frame
                .attrs
                .get(x)
                .cloned()
                .ok_or_else(|| RuntimeFault::Unbound(x.clone())),
            Expression::New { class, args } => {
                let arity = self
                    .prog
                    .class_arity(class)
                    .ok_or_else(|| RuntimeFault::UnknownSymbol(class.clone()))?;
                if arity != args.len() {
                    return Err(RuntimeFault::ArityFault {
                        symbol: class.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let vals = self.eval_args(args, frame)?;
                if !vals.is_empty() {
                    self.check_size(1 + vals.iter().map(ObjectValue::size).sum::<u64>())?;
                }
                Ok(ObjectValue::new(class.as_str().into(), vals))
            }
            Expression::Call {
                receiver,
                method,
                args,
            } => {
                let vals = self.eval_args(args, frame)?;
                let recv = frame
                    .attrs
                    .get(receiver)
                    .cloned()
                    .ok_or_else(|| RuntimeFault::Unbound(receiver.clone()))?;
                let (result, updated) = self.invoke(method, &recv, vals)?;
                frame.attrs.insert(receiver.clone(), updated);
                Ok(result)
            }
        }
    }

    /// Runs `method` on `recv`; returns the result and the new receiver.
    fn invoke(
        &mut self,
        method: &str,
        recv: &ObjectValue,
        args: Vec<ObjectValue>,
    ) -> Result<(ObjectValue, ObjectValue), RuntimeFault> {
        let m = self
            .prog
            .method(method)
            .ok_or_else(|| RuntimeFault::UnknownSymbol(method.to_string()))?;
        if m.arity() != args.len() {
            return Err(RuntimeFault::ArityFault {
                symbol: method.to_string(),
                expected: m.arity(),
                found: args.len(),
            });
        }
        self.burn()?;
        self.trace.calls += 1;
        match m {
            MethodRef::BuiltinAdd => {
                let r = self.builtin_add(&args[0], recv)?;
                Ok((r.clone(), r))
            }
            MethodRef::User(class, def) => {
                if recv.ctor() != class.name || recv.arity() != class.arity() {
                    return Err(RuntimeFault::ReceiverMismatch {
                        method: method.to_string(),
                        expected: class.name.clone(),
                        found: recv.ctor().to_string(),
                    });
                }
                let mut callee = Frame {
                    attrs: class
                        .attributes
                        .iter()
                        .cloned()
                        .zip(recv.children().iter().cloned())
                        .collect(),
                    params: def.params.iter().cloned().zip(args).collect(),
                };
                self.exec(&def.body, &mut callee, None)?;
                let result = callee
                    .attrs
                    .get(&def.result_attr)
                    .cloned()
                    .ok_or_else(|| RuntimeFault::Unbound(def.result_attr.clone()))?;
                let updated = if class.attributes.is_empty() {
                    recv.clone()
                } else {
                    ObjectValue::new(recv.ctor_rc(), callee.attrs.into_values().collect())
                };
                Ok((result, updated))
            }
        }
    }

    /// `r.add(a)`: the numeral `|a| + |r|`, which also becomes the receiver.
    fn builtin_add(&mut self, a: &ObjectValue, r: &ObjectValue) -> Result<ObjectValue, RuntimeFault> {
        let scheme = &self.prog.numerals;
        let x = numeral_decode(a, scheme)?;
        match &self.succ {
            Some(succ) => {
                // Unary: wrap the receiver, sharing its chain.
                let succ = succ.clone();
                self.check_unary(r)?;
                self.check_size(a.size() + r.size())?;
                let v = wrap_unary(r.clone(), a.size(), succ);
                if self.known_unary.len() == 8 {
                    self.known_unary.remove(0);
                }
                self.known_unary.push(v.clone());
                Ok(v)
            }
            None => {
                let n = x + numeral_decode(r, scheme)?;
                self.check_size(encoded_size(&n, scheme).unwrap_or(u64::MAX))?;
                Ok(numeral_encode(&n, scheme))
            }
        }
    }

    fn check_unary(&self, r: &ObjectValue) -> Result<(), RuntimeFault> {
        let NumeralScheme::Unary { succ, zero } = &self.prog.numerals else {
            unreachable!("unary scheme")
        };
        let mut cur = r;
        loop {
            if self.known_unary.iter().any(|k| k.same_node(cur)) {
                return Ok(());
            }
            match (cur.ctor(), cur.children()) {
                (c, [inner]) if c == succ.as_str() => cur = inner,
                (c, []) if c == zero.as_str() => return Ok(()),
                _ => return Err(numeral_decode(r, &self.prog.numerals).unwrap_err().into()),
            }
        }
    }

    fn guard(&mut self, g: &Expression, frame: &mut Frame) -> Result<GuardValue, RuntimeFault> {
        let v = self.eval(g, frame)?;
        let gv = guard_value(&v, &self.prog.numerals);
        if gv == GuardValue::NotNumeral {
            self.trace.warnings.push(format!(
                "guard value {} is not a numeral; treated as skip",
                v.display_bounded(64)
            ));
        }
        Ok(gv)
    }

    /// `path` is `Some` while executing the command of main.
    fn exec(&mut self, c: &Command, frame: &mut Frame, path: Option<&CmdPath>) -> Result<(), RuntimeFault> {
        match &c.kind {
            CommandKind::Skip => Ok(()),
            CommandKind::Assign { target, expr } => {
                let pre = (path.is_some() && self.cfg.record_values)
                    .then(|| frame.attrs.values().cloned().collect::<Vec<_>>());
                let v = self.eval(expr, frame)?;
                match frame.attrs.get_mut(target) {
                    Some(slot) => *slot = v,
                    None => return Err(RuntimeFault::Unbound(target.clone())),
                }
                if let Some(p) = path {
                    self.record(frame, p, c, EventKind::Assign, pre);
                }
                Ok(())
            }
            CommandKind::Seq(items) => {
                for (i, item) in items.iter().enumerate() {
                    let child = path.map(|p| p.child(i as u32));
                    self.exec(item, frame, child.as_ref())?;
                }
                Ok(())
            }
            CommandKind::Loop { attr, body } => {
                let v = frame
                    .attrs
                    .get(attr)
                    .cloned()
                    .ok_or_else(|| RuntimeFault::Unbound(attr.clone()))?;
                let n = v.size();
                let child = path.map(|p| p.child(0));
                if let Some(p) = path {
                    self.trace.loop_counts.push((p.clone(), n));
                    self.record(frame, p, c, EventKind::LoopEntry { count: n }, None);
                }
                for i in 0..n {
                    self.trace.steps += 1;
                    if let Some(p) = path {
                        self.loops.push(LoopMark {
                            path: p.clone(),
                            iteration: i,
                            total: n,
                        });
                    }
                    let r = self.exec(body, frame, child.as_ref());
                    if path.is_some() {
                        self.loops.pop();
                    }
                    r?;
                }
                match frame.attrs.get(attr) {
                    Some(after) if after.same_node(&v) || *after == v => Ok(()),
                    _ => Err(RuntimeFault::LoopAttributeModified(attr.clone())),
                }
            }
            CommandKind::If {
                guard,
                then_branch,
                else_branch,
            } => {
                let (taken, branch, idx) = match self.guard(guard, frame)? {
                    GuardValue::One => (Branch::Then, Some(then_branch), 0),
                    GuardValue::Zero => (Branch::Else, Some(else_branch), 1),
                    GuardValue::Other | GuardValue::NotNumeral => (Branch::Skip, None, 0),
                };
                if let Some(p) = path {
                    self.record(frame, p, c, EventKind::Branch { taken }, None);
                }
                if let Some(b) = branch {
                    let child = path.map(|p| p.child(idx));
                    self.exec(b, frame, child.as_ref())?;
                }
                Ok(())
            }
            CommandKind::While { guard, body } => {
                let child = path.map(|p| p.child(0));
                while self.guard(guard, frame)? == GuardValue::One {
                    self.burn()?;
                    if let Some(p) = path {
                        self.record(frame, p, c, EventKind::WhileIteration, None);
                    }
                    self.exec(body, frame, child.as_ref())?;
                }
                Ok(())
            }
        }
    }
}

/// Result of a run of main, kept even when the run faults.
#[derive(Debug, Clone)]
pub struct Run {
    pub outcome: Result<Frame, RuntimeFault>,
    pub trace: Trace,
}

/// Executes the command of main on `init`.
pub fn execute(p: &Program, init: Frame, cfg: &ExecConfig) -> Run {
    let mut m = Machine::new(p, cfg);
    let mut frame = init;
    let sizes = frame.sizes();
    for (peak, s) in m.trace.peak_sizes.iter_mut().zip(&sizes) {
        *peak = (*peak).max(*s);
    }
    let outcome = m.exec(&p.main.body, &mut frame, Some(&CmdPath::root())).map(|_| frame);
    Run {
        outcome,
        trace: m.trace,
    }
}

pub fn run_main(p: &Program, init: Frame, cfg: &ExecConfig) -> Result<(Frame, Trace), RuntimeFault> {
    let r = execute(p, init, cfg);
    r.outcome.map(|f| (f, r.trace))
}

/// Runs a single command in `frame` (no main-level tracing).
pub fn exec_cmd(p: &Program, c: &Command, frame: &Frame, cfg: &ExecConfig) -> Result<Frame, RuntimeFault> {
    let mut m = Machine::new(p, cfg);
    let mut f = frame.clone();
    m.exec(c, &mut f, None)?;
    Ok(f)
}

/// Evaluates `e` in `frame`, returning its value and the updated frame.
pub fn eval_expr(
    p: &Program,
    e: &Expression,
    frame: &Frame,
    cfg: &ExecConfig,
) -> Result<(ObjectValue, Frame), RuntimeFault> {
    let mut m = Machine::new(p, cfg);
    let mut f = frame.clone();
    let v = m.eval(e, &mut f)?;
    Ok((v, f))
}

/// `recv.method(args)`: the result value and the receiver after the call.
pub fn invoke(
    p: &Program,
    method: &str,
    recv: &ObjectValue,
    args: Vec<ObjectValue>,
    cfg: &ExecConfig,
) -> Result<(ObjectValue, ObjectValue), RuntimeFault> {
    Machine::new(p, cfg).invoke(method, recv, args)
}
