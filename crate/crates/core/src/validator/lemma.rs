//! Sampled checks of the size bounds a sup-interpretation promises.

use num::Zero;
use serde::Serialize;

use super::sampler::{ObjectSampler, Shape};
use crate::annotations::AssignmentMap;
use crate::interp::{eval_expr, invoke, ExecConfig, Frame, ObjectValue};
use crate::annotations::partial_assignment;
use crate::lang::{Expression, Program};
use crate::maxpoly::expr::serde_rat;
use crate::maxpoly::{Point, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub sample: usize,
    /// Inputs in term syntax: arguments then receiver, or `name = term`.
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receiver_after: Option<String>,
    #[serde(serialize_with = "serde_rat::rational")]
    pub bound: Rational,
    #[serde(serialize_with = "serde_rat::rational")]
    pub observed: Rational,
    pub what: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    /// Runs that faulted; they count neither way.
    pub inconclusive: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub faults: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(serialize_with = "opt_rat")]
    pub alpha: Option<Rational>,
}

fn opt_rat<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

impl Outcome {
    fn new(name: impl Into<String>, seed: u64) -> Self {
        Outcome {
            name: name.into(),
            seed,
            samples: 0,
            passed: 0,
            failed: 0,
            inconclusive: 0,
            faults: Vec::new(),
            counterexample: None,
            alpha: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }

    fn fail(&mut self, c: Counterexample) {
        self.failed += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(c);
        }
    }

    fn fault(&mut self, msg: String) {
        self.inconclusive += 1;
        if self.faults.len() < 10 {
            self.faults.push(msg);
        }
    }
}

const SHOW: u64 = 200;

fn show(v: &ObjectValue) -> String {
    v.display_bounded(SHOW)
}

/// `|v| ≤ θ*(v) ≤ α·|v|` on sampled ground objects, with `α` taken from
/// the constructor constants. Without an `α` (a non-additive entry) only
/// the lower bound is checked.
pub fn test_lemma1(p: &Program, i: &AssignmentMap, s: &mut ObjectSampler, shape: &Shape) -> Outcome {
    let mut out = Outcome::new("lemma1", s.seed);
    out.alpha = i.lemma1_alpha(p);
    for k in 0..s.count {
        let v = s.draw(shape);
        out.samples += 1;
        let theta = match i.ground(&v) {
            Ok(t) => t,
            Err(e) => {
                out.fault(e.to_string());
                continue;
            }
        };
        let size = Rational::from_integer(v.size().into());
        let cx = |bound: Rational, observed: Rational, what: &str| Counterexample {
            sample: k,
            inputs: vec![show(&v)],
            result: None,
            receiver_after: None,
            bound,
            observed,
            what: what.to_string(),
        };
        if theta < size {
            out.fail(cx(theta, size, "theta*(v) < |v|"));
        } else if let Some(a) = &out.alpha {
            let upper = a * &size;
            if theta > upper {
                let c = cx(upper, theta, "theta*(v) > alpha*|v|");
                out.fail(c);
            } else {
                out.passed += 1;
            }
        } else {
            out.passed += 1;
        }
    }
    out
}

/// For sampled receivers and arguments, runs `recv.f(args)` and checks
/// `θ(f)(θ*(args), θ*(recv)) ≥ max(θ*(result), θ*(recv′))`.
pub fn test_supinterp(
    p: &Program,
    f: &str,
    i: &AssignmentMap,
    s: &mut ObjectSampler,
    receiver: &Shape,
    args: &[Shape],
    cfg: &ExecConfig,
) -> Outcome {
    let mut out = Outcome::new(format!("supinterp:{f}"), s.seed);
    let Some(entry) = i.methods.get(f) else {
        out.fault(format!("no sup-interpretation for `{f}`"));
        return out;
    };
    for k in 0..s.count {
        let vs = s.draw_all(args);
        let recv = s.draw(receiver);
        out.samples += 1;
        let (v, recv2) = match invoke(p, f, &recv, vs.clone(), cfg) {
            Ok(r) => r,
            Err(e) => {
                out.fault(e.to_string());
                continue;
            }
        };
        let ground = |x: &ObjectValue| i.ground(x);
        let run = || -> Result<(Rational, Rational), crate::annotations::UndefinedSymbol> {
            let mut a = vs.iter().map(ground).collect::<Result<Vec<_>, _>>()?;
            a.push(ground(&recv)?);
            let bound = entry.eval(&a);
            let observed = std::cmp::max(ground(&v)?, ground(&recv2)?);
            Ok((bound, observed))
        };
        match run() {
            Err(e) => out.fault(e.to_string()),
            Ok((bound, observed)) if bound < observed => {
                let mut inputs: Vec<String> = vs.iter().map(show).collect();
                inputs.push(show(&recv));
                out.fail(Counterexample {
                    sample: k,
                    inputs,
                    result: Some(show(&v)),
                    receiver_after: Some(show(&recv2)),
                    bound,
                    observed,
                    what: format!("theta({f}) below max(theta*(result), theta*(receiver after))"),
                });
            }
            Ok(_) => out.passed += 1,
        }
    }
    out
}

/// For sampled main stores and parameter bindings, evaluates `e` and
/// checks `θ*(e)` at the store against the result, and against the
/// receiver afterwards when `e` is a call.
pub fn test_lemma2(
    p: &Program,
    e: &Expression,
    i: &AssignmentMap,
    s: &mut ObjectSampler,
    shapes: &[(String, Shape)],
    default: &Shape,
    cfg: &ExecConfig,
) -> Outcome {
    let mut out = Outcome::new(format!("lemma2:{}", crate::parser::print_expr(e)), s.seed);
    let theta = match partial_assignment(e, i) {
        Ok(t) => t,
        Err(err) => {
            out.fault(err.to_string());
            return out;
        }
    };
    let shape_of = |name: &str| shapes.iter().find(|(n, _)| n == name).map(|x| &x.1).unwrap_or(default);
    let mut params: Vec<String> = Vec::new();
    e.walk(&mut |x| {
        if let Expression::Param(n) = x {
            if !params.contains(n) {
                params.push(n.clone());
            }
        }
    });
    for k in 0..s.count {
        let mut frame = Frame::for_main(p, []);
        for a in &p.main.attributes {
            let v = s.draw(shape_of(a));
            frame.attrs.insert(a.clone(), v);
        }
        for x in &params {
            let v = s.draw(shape_of(x));
            frame.params.insert(x.clone(), v);
        }
        out.samples += 1;
        let (v, after) = match eval_expr(p, e, &frame, cfg) {
            Ok(r) => r,
            Err(err) => {
                out.fault(err.to_string());
                continue;
            }
        };
        let check = || -> Result<(Rational, Rational), crate::annotations::UndefinedSymbol> {
            let mut at = Point::new();
            for (n, v) in frame.attrs.iter().chain(frame.params.iter()) {
                at.insert(n.clone(), i.ground(v)?);
            }
            let bound = theta.eval(&at).unwrap_or_else(|_| Rational::zero());
            let mut observed = i.ground(&v)?;
            if let Expression::Call { receiver, .. } = e {
                if let Some(r) = after.attrs.get(receiver) {
                    observed = std::cmp::max(observed, i.ground(r)?);
                }
            }
            Ok((bound, observed))
        };
        match check() {
            Err(err) => out.fault(err.to_string()),
            Ok((bound, observed)) if bound < observed => {
                let inputs = frame
                    .attrs
                    .iter()
                    .chain(frame.params.iter())
                    .map(|(n, v)| format!("{n} = {}", show(v)))
                    .collect();
                out.fail(Counterexample {
                    sample: k,
                    inputs,
                    result: Some(show(&v)),
                    receiver_after: None,
                    bound,
                    observed,
                    what: "theta*(e) below the value or the receiver afterwards".into(),
                });
            }
            Ok(_) => out.passed += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::bind_lenient;
    use crate::fixtures::*;
    use crate::maxpoly::{rat, CompareConfig};
    use crate::parser::{parse_annotations, parse_program};

    fn position() -> (Program, AssignmentMap) {
        let p = parse_program(POSITION_OO, "t").unwrap();
        let a = parse_annotations(POSITION_SUP, "t").unwrap();
        let b = bind_lenient(&a, &p, &CompareConfig::default()).unwrap();
        (p, b.assignment)
    }

    #[test]
    fn lemma1_on_numerals_and_positions() {
        let (p, i) = position();
        let mut s = ObjectSampler::for_program(&p, 3, 200);
        let o = test_lemma1(&p, &i, &mut s, &Shape::any(&p, 10));
        assert!(o.pass(), "{o:?}");
        assert_eq!(o.alpha, Some(rat(1)));
    }

    #[test]
    fn lemma1_boundary_with_alpha_two() {
        let p = parse_program("Class C { var A; } Class main { var X; X := X }", "t").unwrap();
        let a = parse_annotations("sup class C(a) = a + 2\nsup class S(d) = d + 1\nsup class eps = 0", "t").unwrap();
        let b = bind_lenient(&a, &p, &CompareConfig::default()).unwrap();
        let mut v = ObjectValue::leaf("eps");
        for _ in 0..7 {
            v = ObjectValue::new("C".into(), vec![v]);
        }
        assert_eq!(b.assignment.ground(&v).unwrap(), rat(14));
        assert_eq!(b.assignment.lemma1_alpha(&p), Some(rat(2)));
        let mut s = ObjectSampler::for_program(&p, 5, 100);
        let shape = Shape::Random {
            ctors: vec![("C".into(), 1), ("eps".into(), 0)],
            max_depth: 30,
        };
        assert!(test_lemma1(&p, &b.assignment, &mut s, &shape).pass());
    }

    #[test]
    fn lemma1_upper_bound_needs_zero_leaves() {
        let p = parse_program("Class main { var X; X := X }", "t").unwrap();
        let a = parse_annotations("sup class S(d) = d + 1\nsup class eps = 1", "t").unwrap();
        let b = bind_lenient(&a, &p, &CompareConfig::default()).unwrap();
        let mut s = ObjectSampler::for_program(&p, 5, 100);
        let o = test_lemma1(&p, &b.assignment, &mut s, &Shape::Numeral { max: 20 });
        assert!(!o.pass());
    }

    #[test]
    fn supinterp_add_and_weak_add() {
        let (p, i) = position();
        let num = Shape::Numeral { max: 100 };
        let mut s = ObjectSampler::for_program(&p, 11, 300);
        let o = test_supinterp(&p, "add", &i, &mut s, &num, &[num.clone()], &ExecConfig::default());
        assert!(o.pass(), "{o:?}");

        let weak = parse_annotations("sup add(a, r) = max(a, r)", "t").unwrap();
        let mut wi = i.clone();
        wi.methods.insert(
            "add".into(),
            crate::annotations::Entry::new(vec!["a".into(), "r".into()], weak.sups[0].body.clone()),
        );
        let mut s = ObjectSampler::for_program(&p, 11, 100);
        let o = test_supinterp(&p, "add", &wi, &mut s, &num, &[num.clone()], &ExecConfig::default());
        let c = o.counterexample.expect("weak add fails");
        assert!(c.bound < c.observed);
    }

    #[test]
    fn supinterp_move() {
        let (p, i) = position();
        let num = Shape::Numeral { max: 30 };
        let recv = Shape::instance(&p, "Position", 30).unwrap();
        let mut s = ObjectSampler::for_program(&p, 2, 200);
        let o = test_supinterp(&p, "move", &i, &mut s, &recv, &[num.clone(), num], &ExecConfig::default());
        assert!(o.pass(), "{o:?}");
    }

    #[test]
    fn lemma2_expressions() {
        let (p, i) = position();
        let num = Shape::Numeral { max: 40 };
        let pos = Shape::instance(&p, "Position", 40).unwrap();
        let shapes = vec![("V".to_string(), pos)];
        let cfg = ExecConfig::default();
        for src in ["V.move(W, W)", "V.getX()", "new Position(W, U)", "W", "W.add(U)"] {
            let e = crate::parser::parse_expression(src, &[]).unwrap();
            let mut s = ObjectSampler::for_program(&p, 9, 100);
            let o = test_lemma2(&p, &e, &i, &mut s, &shapes, &num, &cfg);
            assert!(o.pass(), "{src}: {o:?}");
        }
    }
}
