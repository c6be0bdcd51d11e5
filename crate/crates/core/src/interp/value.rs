//! Constructor-tree values.
//!
//! Values are immutable and shared through `Rc`, so a store update never
//! copies a tree. Numeral chains can be millions of nodes deep, so drop,
//! equality and printing are iterative.

use std::fmt;
use std::rc::Rc;

use serde::{Serialize, Serializer};

#[derive(Debug)]
struct Node {
    ctor: Rc<str>,
    children: Vec<ObjectValue>,
    size: u64,
}

impl Drop for Node {
    fn drop(&mut self) {
        let mut stack = std::mem::take(&mut self.children);
        while let Some(v) = stack.pop() {
            if let Ok(mut n) = Rc::try_unwrap(v.0) {
                stack.append(&mut n.children);
            }
        }
    }
}

/// `b(v₁, …, vₙ)`.
#[derive(Debug, Clone)]
pub struct ObjectValue(Rc<Node>);

impl ObjectValue {
    pub fn new(ctor: Rc<str>, children: Vec<ObjectValue>) -> Self {
        // |b| = 0 for nullary b, 1 + Σ|vᵢ| otherwise.
        let size = if children.is_empty() {
            0
        } else {
            1 + children.iter().map(|c| c.size()).sum::<u64>()
        };
        ObjectValue(Rc::new(Node {
            ctor,
            children,
            size,
        }))
    }

    pub fn leaf(ctor: impl Into<Rc<str>>) -> Self {
        ObjectValue::new(ctor.into(), Vec::new())
    }

    pub fn ctor(&self) -> &str {
        &self.0.ctor
    }

    pub fn ctor_rc(&self) -> Rc<str> {
        self.0.ctor.clone()
    }

    pub fn children(&self) -> &[ObjectValue] {
        &self.0.children
    }

    pub fn arity(&self) -> usize {
        self.0.children.len()
    }

    /// Number of constructor occurrences of positive arity.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Address of the shared node; stable while the value is alive.
    pub fn id(&self) -> usize {
        Rc::as_ptr(&self.0) as usize
    }

    pub fn same_node(&self, other: &ObjectValue) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// Term syntax, or a placeholder when the term exceeds `limit` nodes.
    pub fn display_bounded(&self, limit: u64) -> String {
        if self.size() > limit {
            format!("<{} term of size {}>", self.ctor(), self.size())
        } else {
            self.to_string()
        }
    }
}

/// The size of a value: `|b| = 0` if `b` is nullary, else `1 + Σ|vᵢ|`.
pub fn size(v: &ObjectValue) -> u64 {
    v.size()
}

impl PartialEq for ObjectValue {
    fn eq(&self, other: &Self) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if a.same_node(b) {
                continue;
            }
            if a.size() != b.size() || a.ctor() != b.ctor() || a.arity() != b.arity() {
                return false;
            }
            stack.extend(a.children().iter().zip(b.children()));
        }
        true
    }
}

impl Eq for ObjectValue {}

impl fmt::Display for ObjectValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Step<'a> {
            Open(&'a ObjectValue),
            Text(&'static str),
        }
        let mut stack = vec![Step::Open(self)];
        while let Some(s) = stack.pop() {
            match s {
                Step::Text(t) => f.write_str(t)?,
                Step::Open(v) => {
                    f.write_str(v.ctor())?;
                    if v.arity() > 0 {
                        f.write_str("(")?;
                        stack.push(Step::Text(")"));
                        for (i, c) in v.children().iter().enumerate().rev() {
                            stack.push(Step::Open(c));
                            if i > 0 {
                                stack.push(Step::Text(", "));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for ObjectValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.display_bounded(10_000))
    }
}
