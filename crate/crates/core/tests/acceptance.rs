//! The eight acceptance criteria, one line each.
//!
//! Expected values come from closed forms written out here, not from the
//! library under test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use supcheck_core::annotations::{bind_lenient, Entry};
use supcheck_core::criterion::{check_brotherly, generate_obligations, Overall};
use supcheck_core::fixtures::*;
use supcheck_core::interp::{encode_u64, eval_expr, execute, ExecConfig, Frame, ObjectValue};
use supcheck_core::lang::{flatten, well_formed, Expression, Program, Rule};
use supcheck_core::maxpoly::{compare_geq, CompareConfig, CompareVerdict, MaxPoly, Point};
use supcheck_core::parser::{parse_annotations, parse_maxpoly, parse_program};
use supcheck_core::validator::{
    monitor_growth, test_lemma1, test_supinterp, GrowthConfig, GrowthVerdict, ObjectSampler, Shape,
};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

// ---- oracles ----

/// Unary numeral `S^n(eps)` built by hand.
fn unary(n: u64) -> ObjectValue {
    let mut v = ObjectValue::leaf("eps");
    for _ in 0..n {
        v = ObjectValue::new("S".into(), vec![v]);
    }
    v
}

/// Size by direct recursion over the tree.
fn tree_size(v: &ObjectValue) -> u64 {
    if v.arity() == 0 {
        0
    } else {
        1 + v.children().iter().map(tree_size).sum::<u64>()
    }
}

/// Evaluation of a Max-Poly expression tree, independent of normal forms.
fn oracle_eval(f: &MaxPoly, at: &Point) -> Q {
    match f {
        MaxPoly::Const(c) => c.clone(),
        MaxPoly::Var(x) => at[x].clone(),
        MaxPoly::Sum(xs) => xs.iter().fold(Q::zero(), |a, x| a + oracle_eval(x, at)),
        MaxPoly::Product(xs) => xs.iter().fold(q(1), |a, x| a * oracle_eval(x, at)),
        MaxPoly::Max(xs) => xs.iter().map(|x| oracle_eval(x, at)).max().unwrap_or_else(Q::zero),
    }
}

fn pt(kv: &[(&str, i64)]) -> Point {
    kv.iter().map(|(k, v)| (k.to_string(), q(*v))).collect()
}

fn program(src: &str) -> Program {
    parse_program(src, "fixture").expect("fixture parses")
}

// ---- criteria ----

fn example_pipeline() -> Result<(), String> {
    let p = program(POSITION_OO);
    let diags = well_formed(&p);
    if !diags.is_empty() {
        return Err(format!("{} diagnostics", diags.len()));
    }
    let ann = parse_annotations(POSITION_SUP, "position.sup").map_err(|e| e.to_string())?;
    let r = check_brotherly(&p, &ann, &CompareConfig::default()).map_err(|e| e.to_string())?;
    if !matches!(r.overall, Overall::Brotherly) {
        return Err(format!("verdict {}", r.overall.name()));
    }
    if !r.obligations.is_empty() {
        return Err(format!("{} obligations", r.obligations.len()));
    }
    Ok(())
}

fn semantics_fixtures() -> Result<(), String> {
    let p = program(POSITION_OO);
    let cfg = ExecConfig::default();
    let pos = |a: ObjectValue, b: ObjectValue| ObjectValue::new("Position".into(), vec![a, b]);
    let apply = |c: &str, f: &Frame| -> Frame {
        let mini = format!("Class main {{ var W; var U; var V; var Z; {c} }}");
        let m = parse_program(&mini, "inline").unwrap();
        let mut whole = p.clone();
        whole.main = m.main;
        execute(&whole, f.clone(), &cfg).outcome.expect("runs")
    };
    for (w, u) in [(0u64, 0u64), (2, 1), (5, 3), (9, 0)] {
        let sigma = Frame::for_main(&p, [("W".to_string(), unary(w)), ("U".to_string(), unary(u))]);

        let e = Expression::new_object("Position", vec![Expression::attr("W"), Expression::attr("U")]);
        let (v, after) = eval_expr(&p, &e, &sigma, &cfg).map_err(|e| e.to_string())?;
        if v != pos(unary(w), unary(u)) || after != sigma {
            return Err(format!("new Position(W,U) at w={w}, u={u}"));
        }

        let s1 = apply("V := new Position(W, U)", &sigma);
        let mut want = sigma.clone();
        want.attrs.insert("V".into(), pos(unary(w), unary(u)));
        if s1 != want {
            return Err(format!("V := new Position(W,U) at w={w}, u={u}"));
        }

        let (gx, after) = eval_expr(&p, &Expression::call("V", "getX", vec![]), &s1, &cfg).map_err(|e| e.to_string())?;
        if gx != unary(w) || after != s1 {
            return Err(format!("V.getX() value at w={w}"));
        }

        let s2 = apply("U := V.getX()", &s1);
        let mut want = s1.clone();
        want.attrs.insert("U".into(), unary(w));
        if s2 != want {
            return Err(format!("U := V.getX() store at w={w}"));
        }
    }
    for (u1, u2, w) in [(0u64, 0u64, 0u64), (1, 2, 3), (4, 0, 7)] {
        let sigma = Frame::for_main(
            &p,
            [("W".to_string(), unary(w)), ("V".to_string(), pos(unary(u1), unary(u2)))],
        );
        let e = Expression::call("V", "move", vec![Expression::attr("W"), Expression::attr("W")]);
        let (_, after) = eval_expr(&p, &e, &sigma, &cfg).map_err(|e| e.to_string())?;
        if after.attrs["V"] != pos(unary(u1 + w), unary(u2 + w)) {
            return Err(format!("move receiver at u1={u1}, u2={u2}, w={w}"));
        }
    }
    Ok(())
}

fn definition5_harness() -> Result<(), String> {
    let p = program(POSITION_OO);
    let ann = parse_annotations(POSITION_SUP, "position.sup").unwrap();
    let b = bind_lenient(&ann, &p, &CompareConfig::default()).map_err(|e| e.to_string())?;
    let num = Shape::Numeral { max: 100 };
    let cfg = ExecConfig::default();

    let mut s = ObjectSampler::for_program(&p, 2024, 1000);
    let o = test_supinterp(&p, "add", &b.assignment, &mut s, &num, &[num.clone()], &cfg);
    if o.samples != 1000 || o.failed != 0 || o.inconclusive != 0 {
        return Err(format!("add: {} samples, {} failed", o.samples, o.failed));
    }

    let mut weak = b.assignment.clone();
    let body = parse_maxpoly("max(a, r)").unwrap();
    weak.methods.insert("add".into(), Entry::new(vec!["a".into(), "r".into()], body));
    let mut s = ObjectSampler::for_program(&p, 2024, 100);
    let o = test_supinterp(&p, "add", &weak, &mut s, &num, &[num.clone()], &cfg);
    let c = o.counterexample.ok_or("weak add not refuted in 100 samples")?;
    // Re-derive the witness: inputs are the argument then the receiver.
    let size_of = |t: &str| t.matches("S(").count() as i64;
    let (a, r) = (size_of(&c.inputs[0]), size_of(&c.inputs[1]));
    if c.bound != q(a.max(r)) || c.observed != q(a + r) || a.max(r) >= a + r {
        return Err(format!("witness does not re-verify: {c:?}"));
    }
    Ok(())
}

fn lemma1_sandwich() -> Result<(), String> {
    let p = program(POSITION_OO);
    let ann = parse_annotations(POSITION_SUP, "position.sup").unwrap();
    let b = bind_lenient(&ann, &p, &CompareConfig::default()).map_err(|e| e.to_string())?;
    // S(d) = d + 1 and Position(x, y) = x + y + 1 with eps = 0: the
    // constructor constants are all 1, so alpha = 1 and theta* is the size.
    let alpha = q(1);
    if b.assignment.lemma1_alpha(&p) != Some(alpha.clone()) {
        return Err("alpha differs from 1".into());
    }
    let shape = Shape::Random {
        ctors: vec![("S".into(), 1), ("eps".into(), 0), ("Position".into(), 2)],
        max_depth: 12,
    };
    let mut s = ObjectSampler::for_program(&p, 99, 1000);
    for k in 0..1000 {
        let v = s.draw(&shape);
        let size = q(tree_size(&v) as i64);
        let theta = b.assignment.ground(&v).map_err(|e| e.to_string())?;
        if !(size <= theta && theta <= &alpha * &size) {
            return Err(format!("sample {k}: |v| = {size}, theta* = {theta}"));
        }
    }
    let mut s = ObjectSampler::for_program(&p, 99, 1000);
    let o = test_lemma1(&p, &b.assignment, &mut s, &shape);
    if o.failed != 0 || o.passed != 1000 {
        return Err(format!("harness: {} passed, {} failed", o.passed, o.failed));
    }
    Ok(())
}

fn loop_obligation_both_weights() -> Result<(), String> {
    let p = program(LOOPADD_OO);
    let no_sampling = CompareConfig {
        samples: 0,
        max_grid: 0,
        ..CompareConfig::default()
    };

    let fixed = parse_annotations(LOOPADD_FIXED_SUP, "loopadd_fixed.sup").unwrap();
    let b = bind_lenient(&fixed, &p, &no_sampling).map_err(|e| e.to_string())?;
    let obs = generate_obligations(&p, &b).map_err(|e| e.to_string())?;
    if obs.len() != 1 {
        return Err(format!("{} obligations for the corrected weight", obs.len()));
    }
    if compare_geq(&obs[0].lhs, &obs[0].rhs, &no_sampling) != CompareVerdict::Verified {
        return Err("corrected weight not verified by dominance".into());
    }

    let printed = parse_annotations(LOOPADD_PAPER_SUP, "loopadd_paper.sup").unwrap();
    let b = bind_lenient(&printed, &p, &CompareConfig::default()).map_err(|e| e.to_string())?;
    let obs = generate_obligations(&p, &b).map_err(|e| e.to_string())?;
    if obs.len() != 1 {
        return Err(format!("{} obligations for the printed weight", obs.len()));
    }
    // (T+1)*X3 + X1 + X2 against T*(X2+X3) + X1 + X2.
    let lhs = |t: &Q, x1: &Q, x2: &Q, x3: &Q| (t + q(1)) * x3 + x1 + x2;
    let rhs = |t: &Q, x1: &Q, x2: &Q, x3: &Q| t * (x2 + x3) + x1 + x2;
    let CompareVerdict::Falsified(w) = compare_geq(&obs[0].lhs, &obs[0].rhs, &CompareConfig::default()) else {
        return Err("printed weight not falsified".into());
    };
    let get = |k: &str| w.point.get(k).cloned().unwrap_or_else(Q::zero);
    let (t, x1, x2, x3) = (get("T"), get("X1"), get("X2"), get("X3"));
    let (l, r) = (lhs(&t, &x1, &x2, &x3), rhs(&t, &x1, &x2, &x3));
    if !(l < r && l == w.lhs && r == w.rhs) {
        return Err(format!("witness does not re-verify: {l} vs {r}"));
    }
    let at = pt(&[("T", 2), ("X1", 0), ("X2", 1), ("X3", 0)]);
    if oracle_eval(&obs[0].lhs, &at) != q(1) || oracle_eval(&obs[0].rhs, &at) != q(3) {
        return Err("T=2, X1=0, X2=1, X3=0 does not give 1 < 3".into());
    }
    Ok(())
}

fn growth_check() -> Result<(), String> {
    let p = program(LOOPADD_OO);
    let r = monitor_growth(&p, &GrowthConfig::default()).map_err(|e| e.to_string())?;
    if r.points.len() != 8 || r.truncated.is_some() {
        return Err("loop-add schedule did not complete".into());
    }
    for pt in &r.points {
        let (a, b, c) = (pt.input_sizes[0], pt.input_sizes[1], pt.input_sizes[2]);
        if pt.final_sizes[2] != c + a * b {
            return Err(format!("scale {}: |X3'| = {} but law gives {}", pt.scale, pt.final_sizes[2], c + a * b));
        }
    }
    let d = program(DOUBLE_OO);
    let cfg = GrowthConfig {
        scales: vec![2, 4, 8, 16],
        ..GrowthConfig::default()
    };
    let r = monitor_growth(&d, &cfg).map_err(|e| e.to_string())?;
    for pt in &r.points {
        if pt.final_sizes[2] != pt.input_sizes[2] << pt.input_sizes[0] {
            return Err(format!("doubling law broken at scale {}", pt.scale));
        }
    }
    match r.verdict {
        GrowthVerdict::SuperPolySuspect { .. } => Ok(()),
        v => Err(format!("doubling verdict {v:?}")),
    }
}

// Nested-call corpus: numerals N1..N3, Acc objects O1, O2.
const ACC: &str = "
Class Acc {
    var A;
    Acc(a) { A := a; }
    f(x) { A := A.add(x); return A; }
    g(x) { skip; return A; }
    h(x, y) { A := x; A := A.add(y); return A; }
}
";

struct Gen {
    rng: ChaCha8Rng,
    /// Inside `loop N3`, where N3 may not occur.
    in_loop: bool,
}

impl Gen {
    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.rng.gen_range(0..xs.len())]
    }

    fn leaf(&mut self) -> String {
        let xs: &[&str] = if self.in_loop { &["N1", "N2"] } else { &["N1", "N2", "N3"] };
        self.pick(xs).to_string()
    }

    fn num(&mut self, depth: u32) -> String {
        if depth == 0 {
            return self.leaf();
        }
        match self.rng.gen_range(0..5) {
            0 => self.leaf(),
            1 => format!("{}.add({})", self.pick(&["N1", "N2"]), self.num(depth - 1)),
            2 => format!("{}.f({})", self.pick(&["O1", "O2"]), self.num(depth - 1)),
            3 => format!("{}.g({})", self.pick(&["O1", "O2"]), self.num(depth - 1)),
            _ => format!("{}.h({}, {})", self.pick(&["O1", "O2"]), self.num(depth - 1), self.num(depth - 1)),
        }
    }

    fn nested(&mut self) -> String {
        format!("{}.f({}.add({}))", self.pick(&["O1", "O2"]), self.pick(&["N1", "N2"]), self.num(2))
    }

    fn command(&mut self) -> String {
        let targets: &[&str] = if self.in_loop { &["N1", "N2", "O1", "O2"] } else { &["N1", "N2", "N3", "O1", "O2"] };
        let t = self.pick(targets);
        if t.starts_with('O') {
            return format!("{t} := new Acc({})", self.num(2));
        }
        match self.rng.gen_range(0..6) {
            0 if !self.in_loop => {
                self.in_loop = true;
                let body = format!("{}; {}", self.command(), self.command());
                self.in_loop = false;
                format!("loop N3 {{ {body} }}")
            }
            1 => {
                let g = self.pick(&["N1", "N2"]);
                format!("if {g} {{ {} }} else {{ {} }}", self.command(), self.command())
            }
            _ => format!("{t} := {}", self.num(3)),
        }
    }

    fn program(&mut self) -> String {
        let n = self.rng.gen_range(1..5);
        let mut cmds = vec![format!("N1 := {}", self.nested())];
        cmds.extend((0..n).map(|_| self.command()));
        format!(
            "{ACC}\nClass main {{ var N1; var N2; var N3; var O1; var O2; {} }}",
            cmds.join("; ")
        )
    }
}

fn flattening_equivalence() -> Result<(), String> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(7),
        in_loop: false,
    };
    let cfg = ExecConfig {
        fuel: 100_000,
        trace: false,
        ..ExecConfig::default()
    };
    let mut stores = ChaCha8Rng::seed_from_u64(8);
    let (mut ran, mut faulted) = (0, 0);
    for k in 0..60 {
        let src = g.program();
        let p = parse_program(&src, "gen").map_err(|e| format!("program {k}: {e}\n{src}"))?;
        let before = well_formed(&p);
        if before.count(Rule::NonOutermostCall) == 0 {
            return Err(format!("program {k} has no nested call"));
        }
        if before.iter().any(|d| d.rule != Rule::NonOutermostCall) {
            return Err(format!("program {k} is ill-formed beyond nesting: {:?}\n{src}", before.iter().map(|d| d.message.clone()).collect::<Vec<_>>()));
        }
        let f = flatten(&p).map_err(|e| e.to_string())?;
        if !well_formed(&f).is_empty() {
            return Err(format!("program {k}: flattened program is not well-formed"));
        }
        for _ in 0..20 {
            let mut init = Vec::new();
            for a in ["N1", "N2", "N3"] {
                init.push((a.to_string(), encode_u64(stores.gen_range(0..6), &p.numerals)));
            }
            for a in ["O1", "O2"] {
                let inner = encode_u64(stores.gen_range(0..6), &p.numerals);
                init.push((a.to_string(), ObjectValue::new("Acc".into(), vec![inner])));
            }
            let a = execute(&p, Frame::for_main(&p, init.clone()), &cfg).outcome;
            let b = execute(&f, Frame::for_main(&f, init), &cfg).outcome;
            match (a, b) {
                (Ok(x), Ok(y)) => {
                    ran += 1;
                    for attr in &p.main.attributes {
                        if x.attrs[attr] != y.attrs[attr] {
                            return Err(format!("program {k}: `{attr}` differs\n{src}"));
                        }
                    }
                }
                (Err(x), Err(y)) if std::mem::discriminant(&x) == std::mem::discriminant(&y) => faulted += 1,
                (x, y) => return Err(format!("program {k}: outcomes differ: {x:?} vs {y:?}\n{src}")),
            }
        }
    }
    // Matching faults are allowed but must not carry the corpus.
    if ran < 10 * faulted {
        return Err(format!("{ran} completed runs against {faulted} faulting ones"));
    }
    Ok(())
}

/// A random Max-Poly over `vars` with small integer coefficients.
fn random_maxpoly(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> MaxPoly {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.6) {
            MaxPoly::var(vars[rng.gen_range(0..vars.len())])
        } else {
            MaxPoly::int(rng.gen_range(0..4))
        };
    }
    let a = random_maxpoly(rng, vars, depth - 1);
    let b = random_maxpoly(rng, vars, depth - 1);
    match rng.gen_range(0..3) {
        0 => MaxPoly::sum([a, b]),
        1 => MaxPoly::product([a, b]),
        _ => MaxPoly::max([a, b]),
    }
}

fn random_point(rng: &mut ChaCha8Rng, vars: &[String]) -> Point {
    vars.iter()
        .map(|v| {
            let den: i64 = [1, 1, 2, 3, 7, 64][rng.gen_range(0..6)];
            let num: i64 = if rng.gen_bool(0.2) { rng.gen_range(0..=den) } else { rng.gen_range(0..=200 * den) };
            (v.clone(), Q::new(BigInt::from(num), BigInt::from(den)))
        })
        .collect()
}

fn soundness_audit() -> Result<(), String> {
    let mut pairs: Vec<(MaxPoly, MaxPoly)> = Vec::new();
    // Obligations and subterm checks from every fixture.
    for (oo, sup) in [
        (LOOPADD_OO, LOOPADD_FIXED_SUP),
        (LOOPADD_OO, LOOPADD_PAPER_SUP),
        (DOUBLE_OO, DOUBLE_SUP),
        (WHILEADD_OO, WHILEADD_SUP),
    ] {
        let p = program(oo);
        let ann = parse_annotations(sup, "fixture").unwrap();
        let b = bind_lenient(&ann, &p, &CompareConfig::default()).map_err(|e| e.to_string())?;
        for o in generate_obligations(&p, &b).map_err(|e| e.to_string())? {
            pairs.push((o.lhs, o.rhs));
        }
        for w in b.weights.entries.values() {
            for x in &w.formals {
                pairs.push((w.body.clone(), MaxPoly::var(x.clone())));
            }
        }
    }
    for (l, r) in [
        ("x*x + 1", "2*x"),
        ("max(x, y)", "x"),
        ("x + y", "max(x, y)"),
        ("max(x, y)", "x + y"),
        ("(x + 1)*(y + 1)", "x*y + x + y"),
        ("T*X3 + X1 + X2 + X3", "X3"),
        ("x*y", "x"),
        ("3", "max(2, 1/2)"),
    ] {
        pairs.push((parse_maxpoly(l).unwrap(), parse_maxpoly(r).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let vars = ["x", "y", "z"];
    for _ in 0..40 {
        let r = random_maxpoly(&mut rng, &vars, 3);
        let extra = random_maxpoly(&mut rng, &vars, 2);
        let l = if rng.gen_bool(0.5) { MaxPoly::sum([r.clone(), extra]) } else { extra };
        pairs.push((l, r));
    }

    let (mut verified, mut falsified) = (0, 0);
    for (i, (l, r)) in pairs.iter().enumerate() {
        let mut vars: Vec<String> = l.variables().union(&r.variables()).cloned().collect();
        vars.sort();
        let verdicts: Vec<CompareVerdict> = [0u64, 1, 2]
            .iter()
            .map(|&seed| compare_geq(l, r, &CompareConfig { seed, ..CompareConfig::default() }))
            .collect();
        let any_v = verdicts.iter().any(|v| v.is_verified());
        let any_f = verdicts.iter().any(|v| v.witness().is_some());
        if any_v && any_f {
            return Err(format!("pair {i}: contradictory verdicts for {l} >= {r}"));
        }
        for v in &verdicts {
            if let CompareVerdict::Falsified(w) = v {
                let mut at = w.point.clone();
                for x in &vars {
                    at.entry(x.clone()).or_insert_with(Q::zero);
                }
                let (a, b) = (oracle_eval(l, &at), oracle_eval(r, &at));
                if !(a < b && a == w.lhs && b == w.rhs) {
                    return Err(format!("pair {i}: witness for {l} >= {r} does not re-verify"));
                }
                falsified += 1;
            }
        }
        if any_v {
            verified += 1;
            let mut prng = ChaCha8Rng::seed_from_u64(i as u64);
            for _ in 0..10_000 {
                let at = random_point(&mut prng, &vars);
                if oracle_eval(l, &at) < oracle_eval(r, &at) {
                    return Err(format!("pair {i}: verified {l} >= {r} fails at {at:?}"));
                }
            }
        }
    }
    if verified == 0 || falsified == 0 {
        return Err(format!("degenerate corpus: {verified} verified, {falsified} falsified"));
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Result<(), String>); 8] = [
        ("example program is brotherly with no obligations", example_pipeline),
        ("interpreter reproduces the worked transitions", semantics_fixtures),
        ("method bounds hold on sampled runs; weak add is refuted", definition5_harness),
        ("size sandwich on random objects", lemma1_sandwich),
        ("loop obligation under both weights", loop_obligation_both_weights),
        ("growth law and super-polynomial flag", growth_check),
        ("flattening preserves final stores", flattening_equivalence),
        ("verified and falsified answers re-check exactly", soundness_audit),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(()) => println!("criterion {}: PASS  {name} ({secs:.2}s)", i + 1),
            Err(e) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2}s): {e}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
