//! Dynamic checks of the static side on concrete executions.
//!
//! Everything here samples; passes are qualified by the seed, sample count
//! and size ranges recorded in each outcome.

pub mod growth;
pub mod lemma;
pub mod sampler;

pub use growth::{default_scales, monitor_growth, GrowthConfig, GrowthError, GrowthReport, GrowthVerdict, ScalePoint};
pub use lemma::{test_lemma1, test_lemma2, test_supinterp, Counterexample, Outcome};
pub use sampler::{ObjectSampler, Shape};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::annotations::Binding;
use crate::interp::{ExecConfig, ObjectValue};
use crate::lang::{CommandKind, Expression, MethodRef, Program};

#[derive(Debug, Clone, Serialize)]
pub struct ValidateConfig {
    pub seed: u64,
    pub samples: usize,
    /// Largest numeral value drawn.
    pub max_numeral: u64,
    /// Depth bound for random terms.
    pub max_depth: u32,
    pub exec: ExecConfig,
    pub growth: GrowthConfig,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            seed: 0,
            samples: 1000,
            max_numeral: 100,
            max_depth: 10,
            exec: ExecConfig {
                fuel: 100_000,
                trace: false,
                ..ExecConfig::default()
            },
            growth: GrowthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub lemma1: Outcome,
    pub supinterp: Vec<Outcome>,
    pub lemma2: Vec<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_error: Option<String>,
    pub pass: bool,
}

/// Which main attributes receive calls to user methods, and of what class.
/// Everything else is sampled as a numeral.
pub fn attribute_shapes(p: &Program, max: u64) -> Vec<(String, Shape)> {
    let mut classes: BTreeMap<String, String> = BTreeMap::new();
    for e in p.main.body.expressions() {
        e.walk(&mut |x| {
            if let Expression::Call { receiver, method, .. } = x {
                if let Some(MethodRef::User(c, _)) = p.method(method) {
                    classes.entry(receiver.clone()).or_insert_with(|| c.name.clone());
                }
            }
        });
    }
    classes
        .into_iter()
        .filter_map(|(a, c)| Shape::instance(p, &c, max).map(|s| (a, s)))
        .collect()
}

pub fn validate(p: &Program, b: &Binding, cfg: &ValidateConfig) -> ValidationReport {
    let i = &b.assignment;
    let num = Shape::Numeral { max: cfg.max_numeral };
    let mut seed = cfg.seed;
    let mut next = || {
        let s = seed;
        seed = seed.wrapping_add(1);
        ObjectSampler::for_program(p, s, cfg.samples)
    };

    let lemma1 = test_lemma1(p, i, &mut next(), &Shape::any(p, cfg.max_depth));

    let mut supinterp = Vec::new();
    for f in i.methods.keys() {
        let (recv, arity) = match p.method(f) {
            Some(MethodRef::User(c, m)) => match Shape::instance(p, &c.name, cfg.max_numeral) {
                Some(s) => (s, m.params.len()),
                None => continue,
            },
            Some(MethodRef::BuiltinAdd) => (num.clone(), 1),
            None => continue,
        };
        let args = vec![num.clone(); arity];
        supinterp.push(test_supinterp(p, f, i, &mut next(), &recv, &args, &cfg.exec));
    }

    let shapes = attribute_shapes(p, cfg.max_numeral);
    let mut seen = Vec::new();
    let mut lemma2 = Vec::new();
    for (_, c) in p.main.body.occurrences() {
        if let CommandKind::Assign { expr, .. } = &c.kind {
            if !seen.contains(expr) {
                seen.push(expr.clone());
                lemma2.push(test_lemma2(p, expr, i, &mut next(), &shapes, &num, &cfg.exec));
            }
        }
    }

    let mut gcfg = cfg.growth.clone();
    if gcfg.inputs.is_empty() {
        let objects: Vec<&String> = shapes.iter().map(|s| &s.0).collect();
        gcfg.inputs = p.main.attributes.iter().filter(|a| !objects.contains(a)).cloned().collect();
        let zero = ObjectValue::leaf(p.numerals.zero_symbol());
        for (a, s) in &shapes {
            if let Shape::Ctor { class, args } = s {
                let v = ObjectValue::new(class.as_str().into(), vec![zero.clone(); args.len()]);
                gcfg.fixed.push((a.clone(), v));
            }
        }
    }
    let (growth, growth_error) = match monitor_growth(p, &gcfg) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let growth_ok = growth.as_ref().is_none_or(|g| {
        !matches!(g.verdict, GrowthVerdict::SuperPolySuspect { .. }) && g.candidate_holds != Some(false)
    });
    let pass = lemma1.failed == 0
        && supinterp.iter().all(|o| o.failed == 0)
        && lemma2.iter().all(|o| o.failed == 0)
        && growth_ok
        && growth_error.is_none();
    ValidationReport {
        lemma1,
        supinterp,
        lemma2,
        growth,
        growth_error,
        pass,
    }
}
