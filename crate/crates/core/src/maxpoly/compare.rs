//! Three-valued inequality checking over (ℝ⁺)^k.

use std::collections::BTreeSet;

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::expr::{serde_rat, MaxPoly, Point, Rational};
use super::normal::{normalize, Monomial, NormalForm};

/// Sampling budget for counterexample search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareConfig {
    /// Upper end `B` of the random sampling box `[0, B]^k`.
    pub bound: u64,
    /// Number `N` of random points after the grid.
    pub samples: usize,
    pub seed: u64,
    /// Grid points beyond this count are subsampled deterministically.
    pub max_grid: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            bound: 1000,
            samples: 1000,
            seed: 0,
            max_grid: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "serde_rat::point")]
    pub point: Point,
    #[serde(serialize_with = "serde_rat::rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "serde_rat::rational")]
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CompareVerdict {
    Verified,
    Falsified(Witness),
    Unknown,
}

impl CompareVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, CompareVerdict::Verified)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            CompareVerdict::Falsified(w) => Some(w),
            _ => None,
        }
    }
}

pub const GRID: [(i64, i64); 5] = [(0, 1), (1, 2), (1, 1), (2, 1), (10, 1)];

/// `true` when every polynomial of `rhs` is coefficient-wise below some
/// polynomial of `lhs`.
pub fn dominates(lhs: &NormalForm, rhs: &NormalForm) -> bool {
    rhs.polynomials()
        .iter()
        .all(|q| lhs.polynomials().iter().any(|p| q.dominated_by(p)))
}

/// A random rational in `[0, bound]` with a small denominator.
pub fn random_rational<R: Rng>(rng: &mut R, bound: u64) -> Rational {
    let den: u64 = match rng.gen_range(0..4) {
        0 | 1 => 1,
        2 => 2,
        _ => rng.gen_range(1..=64),
    };
    let num = rng.gen_range(0..=bound.saturating_mul(den));
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn random_point<R: Rng>(rng: &mut R, vars: &BTreeSet<String>, bound: u64) -> Point {
    vars.iter()
        .map(|v| (v.clone(), random_rational(rng, bound)))
        .collect()
}

fn grid_point(vars: &[String], mut index: usize) -> Point {
    let mut p = Point::new();
    for v in vars {
        let (n, d) = GRID[index % GRID.len()];
        index /= GRID.len();
        p.insert(v.clone(), Rational::new(n.into(), d.into()));
    }
    p
}

/// Decides `lhs ≥ rhs` pointwise on (ℝ⁺)^k where possible.
///
/// `Verified` is a proof by monomial dominance after splitting maxes.
/// `Falsified` carries a point at which exact evaluation gives
/// `lhs < rhs`. Anything else is `Unknown`.
pub fn compare_geq(lhs: &MaxPoly, rhs: &MaxPoly, cfg: &CompareConfig) -> CompareVerdict {
    let l = normalize(lhs);
    let r = normalize(rhs);
    if dominates(&l, &r) {
        return CompareVerdict::Verified;
    }
    let vars: BTreeSet<String> = lhs.variables().union(&rhs.variables()).cloned().collect();
    let check = |p: &Point| -> Option<CompareVerdict> {
        let a = l.eval(p).expect("point covers all variables");
        let b = r.eval(p).expect("point covers all variables");
        if a < b {
            // Report values of the original expressions, not the normal forms.
            let lhs_v = lhs.eval(p).expect("point covers all variables");
            let rhs_v = rhs.eval(p).expect("point covers all variables");
            debug_assert!(lhs_v < rhs_v);
            Some(CompareVerdict::Falsified(Witness {
                point: p.clone(),
                lhs: lhs_v,
                rhs: rhs_v,
            }))
        } else {
            None
        }
    };
    if vars.is_empty() {
        return check(&Point::new()).unwrap_or(CompareVerdict::Verified);
    }

    let names: Vec<String> = vars.iter().cloned().collect();
    let full = GRID
        .len()
        .checked_pow(names.len() as u32)
        .unwrap_or(usize::MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if full <= cfg.max_grid {
        for i in 0..full {
            if let Some(v) = check(&grid_point(&names, i)) {
                return v;
            }
        }
    } else {
        for _ in 0..cfg.max_grid {
            let p: Point = names
                .iter()
                .map(|v| {
                    let (n, d) = GRID[rng.gen_range(0..GRID.len())];
                    (v.clone(), Rational::new(n.into(), d.into()))
                })
                .collect();
            if let Some(v) = check(&p) {
                return v;
            }
        }
    }
    for _ in 0..cfg.samples {
        if let Some(v) = check(&random_point(&mut rng, &vars, cfg.bound)) {
            return v;
        }
    }
    CompareVerdict::Unknown
}

/// The constant `α` if `f` is exactly `x₁ + … + xₘ + α` with `α ≥ 1`.
pub fn additive_constant(f: &MaxPoly, formals: &[String]) -> Option<Rational> {
    let nf = normalize(f);
    if !nf.is_single() {
        return None;
    }
    let poly = &nf.polynomials()[0];
    let mut alpha = Rational::zero();
    let mut seen = 0usize;
    for (m, c) in poly.terms() {
        if m.degree() == 0 {
            alpha = c.clone();
        } else if m.degree() == 1 && formals.contains(&m.powers()[0].0) && c.is_one() {
            seen += 1;
        } else {
            return None;
        }
    }
    let distinct: BTreeSet<&String> = formals.iter().collect();
    (seen == distinct.len() && alpha >= Rational::one()).then_some(alpha)
}

/// Additivity of a class entry: `x₁ + … + xₘ + α` with `α ≥ 1`.
pub fn is_additive(f: &MaxPoly, formals: &[String]) -> bool {
    additive_constant(f, formals).is_some()
}

/// `compare_geq(f, xᵢ)` for each formal `xᵢ`.
pub fn has_subterm_property(
    f: &MaxPoly,
    formals: &[String],
    cfg: &CompareConfig,
) -> Vec<(String, CompareVerdict)> {
    formals
        .iter()
        .map(|x| (x.clone(), compare_geq(f, &MaxPoly::var(x.clone()), cfg)))
        .collect()
}

/// Coefficient of `x` in a polynomial, used for hints.
pub fn linear_coefficient(f: &MaxPoly, x: &str) -> Vec<Rational> {
    normalize(f)
        .polynomials()
        .iter()
        .map(|p| p.coefficient(&Monomial::var(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxpoly::expr::{point, rat};

    fn p(s: &str) -> MaxPoly {
        MaxPoly::parse(s).unwrap()
    }

    fn cmp(a: &str, b: &str) -> CompareVerdict {
        compare_geq(&p(a), &p(b), &CompareConfig::default())
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn corrected_obligation_is_verified() {
        assert_eq!(cmp("(T+1)*X2 + X1 + X2 + X3", "T*X2 + X1 + X2 + (X3 + X2)"), CompareVerdict::Verified);
        assert_eq!(cmp("T*X2 + X2 + X1 + X3", "T*X2 + X1 + X3 + X2"), CompareVerdict::Verified);
    }

    #[test]
    fn printed_obligation_is_falsified() {
        let lhs = p("(T+1)*X3 + X1 + X2");
        let rhs = p("T*(X3 + X2) + X1 + X2");
        let v = compare_geq(&lhs, &rhs, &CompareConfig::default());
        let w = v.witness().expect("falsified");
        assert!(w.lhs < w.rhs);
        assert_eq!(lhs.eval(&w.point).unwrap(), w.lhs);
        assert_eq!(rhs.eval(&w.point).unwrap(), w.rhs);
        // The documented witness is a violation as well.
        let at = point([("T", rat(2)), ("X1", rat(0)), ("X2", rat(1)), ("X3", rat(0))]);
        assert_eq!(lhs.eval(&at).unwrap(), rat(1));
        assert_eq!(rhs.eval(&at).unwrap(), rat(3));
    }

    #[test]
    fn constant_slack() {
        assert_eq!(cmp("x + 1", "x"), CompareVerdict::Verified);
        assert!(cmp("x", "x + 1").witness().is_some());
    }

    #[test]
    fn closed_constants() {
        assert_eq!(cmp("3", "2"), CompareVerdict::Verified);
        let v = cmp("2", "3");
        assert_eq!(v.witness().unwrap().point, Point::new());
    }

    #[test]
    fn unknown_when_true_but_not_dominated() {
        // x² + 1 ≥ 2x holds everywhere but not coefficient-wise.
        assert_eq!(cmp("x*x + 1", "2*x"), CompareVerdict::Unknown);
    }

    #[test]
    fn max_on_the_left() {
        assert_eq!(cmp("max(x, y)", "y"), CompareVerdict::Verified);
        assert!(cmp("max(x, y)", "x + y").witness().is_some());
    }

    #[test]
    fn additivity() {
        assert!(is_additive(&p("x + y + 1"), &names(&["x", "y"])));
        assert!(is_additive(&p("d + 1"), &names(&["d"])));
        assert!(!is_additive(&p("2*x + 1"), &names(&["x"])));
        assert!(!is_additive(&p("x*y"), &names(&["x", "y"])));
        assert!(!is_additive(&p("x + y"), &names(&["x", "y"])));
        assert!(!is_additive(&p("x + 1"), &names(&["x", "y"])));
        assert!(!is_additive(&p("max(x, 1) + 1"), &names(&["x"])));
        assert_eq!(additive_constant(&p("x + 3/2"), &names(&["x"])), Some(crate::maxpoly::expr::ratio(3, 2)));
    }

    #[test]
    fn subterm_property() {
        let f = p("T*d2 + d1 + d3");
        let r = has_subterm_property(&f, &names(&["d1", "d2", "d3"]), &CompareConfig::default());
        assert!(r[0].1.is_verified());
        let w = r[1].1.witness().expect("d2 not covered when T = 0");
        assert_eq!(w.point["T"], rat(0));
        assert!(r[2].1.is_verified());

        let fixed = p("T*d2 + d1 + d2 + d3");
        let r = has_subterm_property(&fixed, &names(&["T", "d1", "d2", "d3"]), &CompareConfig::default());
        assert!(r[1..].iter().all(|(_, v)| v.is_verified()));

        let r = has_subterm_property(&p("max(x, y)"), &names(&["x", "y"]), &CompareConfig::default());
        assert!(r.iter().all(|(_, v)| v.is_verified()));

        let r = has_subterm_property(&p("5"), &names(&["x"]), &CompareConfig::default());
        let w = r[0].1.witness().unwrap();
        assert!(w.point["x"] > rat(5));
    }
}
