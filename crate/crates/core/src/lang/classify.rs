//! Classification of command occurrences (flat, minimum, looped, whiled).
//!
//! `⊑` on occurrences is the descendant-or-self relation of the command tree:
//! each of its clauses (sequence context, `if` branches, `loop` body, `while`
//! body) steps from a command to one of its children, and sequences are
//! flat lists. On [`CmdPath`]s this is the prefix order.

use std::collections::BTreeMap;

use serde::Serialize;

use super::ast::{CmdPath, Command, CommandKind, Program};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub flat: bool,
    pub minimum: bool,
    pub looped: bool,
    pub whiled: bool,
}

impl Flags {
    pub fn weight_bearing(&self) -> bool {
        self.flat && self.minimum && (self.looped || self.whiled)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Skip,
    Assign,
    Seq,
    Loop,
    If,
    While,
}

impl Shape {
    fn of(c: &Command) -> Self {
        match c.kind {
            CommandKind::Skip => Shape::Skip,
            CommandKind::Assign { .. } => Shape::Assign,
            CommandKind::Seq(_) => Shape::Seq,
            CommandKind::Loop { .. } => Shape::Loop,
            CommandKind::If { .. } => Shape::If,
            CommandKind::While { .. } => Shape::While,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OccurrenceInfo {
    pub shape: Shape,
    pub label: Option<String>,
    pub flags: Flags,
}

/// Per-occurrence flags of one command tree.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub occurrences: BTreeMap<CmdPath, OccurrenceInfo>,
}

impl Classification {
    pub fn flags(&self, path: &CmdPath) -> Option<Flags> {
        self.occurrences.get(path).map(|o| o.flags)
    }

    /// `a ⊑ b`.
    pub fn below(&self, a: &CmdPath, b: &CmdPath) -> bool {
        self.occurrences.contains_key(a) && self.occurrences.contains_key(b) && a.is_below_or_eq(b)
    }

    /// Occurrences that must carry a weight, in source order.
    pub fn weight_bearing(&self) -> Vec<&CmdPath> {
        self.occurrences
            .iter()
            .filter(|(_, o)| o.flags.weight_bearing())
            .map(|(p, _)| p)
            .collect()
    }

    pub fn by_label(&self, label: &str) -> Option<(&CmdPath, &OccurrenceInfo)> {
        self.occurrences
            .iter()
            .find(|(_, o)| o.label.as_deref() == Some(label))
    }
}

/// Classifies every occurrence of `root`.
pub fn classify_command(root: &Command) -> Classification {
    let occs = root.occurrences();
    let shapes: Vec<(CmdPath, Shape)> = occs.iter().map(|(p, c)| (p.clone(), Shape::of(c))).collect();
    let whiles: Vec<&CmdPath> = shapes
        .iter()
        .filter(|(_, s)| *s == Shape::While)
        .map(|(p, _)| p)
        .collect();
    let loops: Vec<&CmdPath> = shapes
        .iter()
        .filter(|(_, s)| *s == Shape::Loop)
        .map(|(p, _)| p)
        .collect();

    let whiled = |p: &CmdPath| whiles.iter().any(|w| p.is_below_or_eq(w) || w.is_below_or_eq(p));

    let mut occurrences = BTreeMap::new();
    for (path, cmd) in &occs {
        let shape = Shape::of(cmd);
        // flat: no loop/while whose body contains this occurrence, i.e. no
        // strict loop/while ancestor.
        let flat = !whiles
            .iter()
            .chain(loops.iter())
            .any(|a| path.is_below_or_eq(&a.child(0)));
        let minimum = !matches!(shape, Shape::Seq | Shape::If);
        let looped = loops
            .iter()
            .any(|l| path.is_below_or_eq(l) && !whiled(&l.child(0)));
        let flags = Flags {
            flat,
            minimum,
            looped,
            whiled: whiled(path),
        };
        occurrences.insert(
            path.clone(),
            OccurrenceInfo {
                shape,
                label: cmd.label.clone(),
                flags,
            },
        );
    }
    Classification { occurrences }
}

/// Classifies the command of the main class.
pub fn classify(p: &Program) -> Classification {
    classify_command(&p.main.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn main_of(src: &str) -> Classification {
        classify(&parse_program(src, "t").unwrap())
    }

    #[test]
    fn position_has_no_weight_bearing_command() {
        let c = classify(&parse_program(crate::fixtures::POSITION_OO, "p").unwrap());
        assert!(c.weight_bearing().is_empty());
        assert!(c.occurrences.values().all(|o| !o.flags.looped && !o.flags.whiled));
    }

    #[test]
    fn loop_add_single_weight_bearing_loop() {
        let c = classify(&parse_program(crate::fixtures::LOOPADD_OO, "p").unwrap());
        let wb = c.weight_bearing();
        assert_eq!(wb, vec![&CmdPath::root()]);
        let f = c.flags(&CmdPath::root()).unwrap();
        assert!(f.flat && f.minimum && f.looped && !f.whiled);
        // The assignment in the body is looped but not flat.
        let inner = c.flags(&CmdPath(vec![0])).unwrap();
        assert!(inner.looped && !inner.flat);
    }

    #[test]
    fn loop_around_while_is_whiled() {
        let c = main_of("Class main { var X; var Y; loop X { while Y { skip } } }");
        let f = c.flags(&CmdPath::root()).unwrap();
        assert!(f.flat && f.minimum && f.whiled && !f.looped);
        assert_eq!(c.weight_bearing(), vec![&CmdPath::root()]);
    }

    #[test]
    fn sequence_and_if_are_not_minimum() {
        let c = main_of("Class main { var X; var Y; skip; if X { skip } else { Y := X } }");
        assert!(!c.flags(&CmdPath::root()).unwrap().minimum);
        assert!(!c.flags(&CmdPath(vec![1])).unwrap().minimum);
        assert!(c.flags(&CmdPath(vec![1, 1])).unwrap().minimum);
        // Commands under an if stay flat.
        assert!(c.flags(&CmdPath(vec![1, 1])).unwrap().flat);
    }

    #[test]
    fn nested_loops_only_outer_is_weight_bearing() {
        let c = main_of("Class main { var X; var Y; var Z; loop X { loop Y { Z := Z.add(X) } } }");
        assert_eq!(c.weight_bearing(), vec![&CmdPath::root()]);
        let inner = c.flags(&CmdPath(vec![0])).unwrap();
        assert!(!inner.flat && inner.looped);
    }

    #[test]
    fn order_is_prefix() {
        let c = main_of("Class main { var X; var Y; loop X { Y := Y; Y := Y } }");
        assert!(c.below(&CmdPath(vec![0, 1]), &CmdPath::root()));
        assert!(c.below(&CmdPath(vec![0, 1]), &CmdPath(vec![0])));
        assert!(!c.below(&CmdPath(vec![0, 1]), &CmdPath(vec![0, 0])));
        assert!(!c.below(&CmdPath::root(), &CmdPath(vec![0])));
    }
}
