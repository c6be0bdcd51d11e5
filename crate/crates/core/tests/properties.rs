use std::collections::BTreeMap;

use num::{BigInt, BigRational};
use proptest::prelude::*;

use supcheck_core::annotations::bind_lenient;
use supcheck_core::criterion::{dedup, generate_obligations_raw};
use supcheck_core::fixtures::*;
use supcheck_core::interp::{encode_u64, execute, ExecConfig, Frame};
use supcheck_core::lang::{classify_command, flatten, Command, Expression};
use supcheck_core::maxpoly::{compare_geq, normalize, CompareConfig, MaxPoly, Point};
use supcheck_core::parser::{parse_annotations, parse_maxpoly, parse_program, pretty_print};

const VARS: [&str; 3] = ["x", "y", "z"];

fn maxpoly() -> impl Strategy<Value = MaxPoly> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(|i| MaxPoly::var(VARS[i])),
        (0u64..5).prop_map(MaxPoly::int),
        (1i64..7, 1i64..5).prop_map(|(n, d)| MaxPoly::Const(BigRational::new(n.into(), d.into()))),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(MaxPoly::sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(MaxPoly::product),
            prop::collection::vec(inner, 2..4).prop_map(MaxPoly::max),
        ]
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (0i64..200, prop_oneof![Just(1i64), Just(2), Just(3), Just(16)])
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn point() -> impl Strategy<Value = Point> {
    prop::collection::vec(rational(), 3).prop_map(|v| VARS.iter().map(|s| s.to_string()).zip(v).collect())
}

proptest! {
    #[test]
    fn normal_form_agrees_with_expression(f in maxpoly(), at in point()) {
        prop_assert_eq!(normalize(&f).eval(&at), Some(f.eval(&at).unwrap()));
    }

    #[test]
    fn composition_is_evaluation_at_the_inner_value(f in maxpoly(), g in maxpoly(), at in point()) {
        let mut inner = at.clone();
        inner.insert("x".into(), g.eval(&at).unwrap());
        prop_assert_eq!(f.compose("x", &g).eval(&at).unwrap(), f.eval(&inner).unwrap());
    }

    #[test]
    fn weakly_monotone(f in maxpoly(), at in point(), bump in point()) {
        let higher: Point = at.iter().map(|(k, v)| (k.clone(), v + &bump[k])).collect();
        prop_assert!(f.eval(&at).unwrap() <= f.eval(&higher).unwrap());
    }

    #[test]
    fn display_round_trips(f in maxpoly(), at in point()) {
        let back = parse_maxpoly(&f.to_string()).unwrap();
        prop_assert_eq!(back.eval(&at).unwrap(), f.eval(&at).unwrap());
    }

    #[test]
    fn verdicts_are_sound(f in maxpoly(), g in maxpoly(), at in point()) {
        let cfg = CompareConfig { samples: 50, ..CompareConfig::default() };
        match compare_geq(&f, &g, &cfg) {
            v if v.is_verified() => prop_assert!(f.eval(&at).unwrap() >= g.eval(&at).unwrap()),
            v => if let Some(w) = v.witness() {
                let mut p = w.point.clone();
                for x in VARS {
                    p.entry(x.to_string()).or_insert_with(|| BigRational::from_integer(0.into()));
                }
                prop_assert!(f.eval(&p).unwrap() < g.eval(&p).unwrap());
            },
        }
    }

    #[test]
    fn a_sum_dominates_its_parts(f in maxpoly(), g in maxpoly()) {
        let s = MaxPoly::sum([f.clone(), g]);
        prop_assert!(compare_geq(&s, &f, &CompareConfig::default()).is_verified());
    }
}

fn command() -> impl Strategy<Value = Command> {
    let leaf = prop_oneof![
        Just(Command::skip()),
        (0usize..3).prop_map(|i| Command::assign(VARS[i], Expression::attr(VARS[(i + 1) % 3]))),
    ];
    leaf.prop_recursive(4, 20, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|c| Command::loop_over("x", c)),
            inner.clone().prop_map(|c| Command::while_loop(Expression::attr("y"), c)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Command::if_else(Expression::attr("z"), a, b)),
            prop::collection::vec(inner, 2..4).prop_map(Command::seq),
        ]
    })
}

proptest! {
    #[test]
    fn looped_and_whiled_are_exclusive(c in command()) {
        let cls = classify_command(&c);
        for (path, _) in c.occurrences() {
            let f = cls.flags(&path).unwrap();
            prop_assert!(!(f.looped && f.whiled), "{path}");
        }
    }
}

#[test]
fn fixtures_pretty_print_round_trip() {
    for src in [POSITION_OO, LOOPADD_OO, DOUBLE_OO, WHILE_TRUE_OO, NESTED_OO, WHILEADD_OO] {
        let p = parse_program(src, "fixture").unwrap();
        let printed = pretty_print(&p);
        let q = parse_program(&printed, "printed").unwrap();
        assert_eq!(p, q, "{printed}");
        assert_eq!(pretty_print(&q), printed);
    }
}

#[test]
fn flattening_the_nested_fixture_keeps_its_result() {
    let p = parse_program(NESTED_OO, "nested.oo").unwrap();
    let f = flatten(&p).unwrap();
    let cfg = ExecConfig::default();
    for (x, a) in [(0, 0), (1, 3), (5, 2)] {
        let acc = supcheck_core::ObjectValue::new("Acc".into(), vec![encode_u64(a, &p.numerals)]);
        let init = [
            ("X".to_string(), encode_u64(x, &p.numerals)),
            ("U".to_string(), acc.clone()),
            ("V".to_string(), acc),
        ];
        let a = execute(&p, Frame::for_main(&p, init.clone()), &cfg).outcome.unwrap();
        let b = execute(&f, Frame::for_main(&f, init), &cfg).outcome.unwrap();
        for attr in ["X", "U", "V"] {
            assert_eq!(a.attrs[attr], b.attrs[attr]);
        }
    }
}

#[test]
fn deduplication_keeps_every_inequality() {
    let p = parse_program(LOOPADD_OO, "t").unwrap();
    for sup in [LOOPADD_FIXED_SUP, LOOPADD_PAPER_SUP] {
        let b = bind_lenient(&parse_annotations(sup, "t").unwrap(), &p, &CompareConfig::default()).unwrap();
        let raw = generate_obligations_raw(&p, &b).unwrap();
        let merged = dedup(raw.clone());
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for o in &raw {
            *seen.entry(o.render()).or_default() += 1;
        }
        assert_eq!(merged.len(), seen.len());
        for o in &merged {
            assert_eq!(o.provenance.len(), seen[&o.render()]);
        }
    }
}
