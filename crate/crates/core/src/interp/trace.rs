use serde::Serialize;

use super::value::ObjectValue;
use crate::lang::CmdPath;

/// Position inside an enclosing `loop` of main.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopMark {
    pub path: CmdPath,
    /// Zero-based iteration index.
    pub iteration: u64,
    pub total: u64,
}

impl LoopMark {
    /// Iterations still to run after the current one.
    pub fn remaining(&self) -> u64 {
        self.total - self.iteration - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    Assign,
    LoopEntry { count: u64 },
    WhileIteration,
    Branch { taken: Branch },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Then,
    Else,
    Skip,
}

/// One executed command of main.
#[derive(Debug, Clone, Serialize)]
pub struct TraceEvent {
    pub step: u64,
    pub path: CmdPath,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub kind: EventKind,
    /// Sizes of the main attributes after the command, in declaration order.
    pub sizes: Vec<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<LoopMark>,
    /// Store before an assignment, kept only when values are recorded.
    #[serde(skip)]
    pub pre: Option<Vec<ObjectValue>>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Trace {
    pub attributes: Vec<String>,
    pub events: Vec<TraceEvent>,
    /// `(loop occurrence, iteration count)` per loop entry in main.
    pub loop_counts: Vec<(CmdPath, u64)>,
    /// Method calls, while iterations and loop iterations.
    pub steps: u64,
    pub calls: u64,
    /// Largest size seen per main attribute at any point of the run.
    pub peak_sizes: Vec<u64>,
    pub warnings: Vec<String>,
}

impl Trace {
    pub fn peak(&self) -> u64 {
        self.peak_sizes.iter().copied().max().unwrap_or(0)
    }
}
