//! Seeded generation of ground objects.

use num::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::interp::{numeral_encode, ObjectValue};
use crate::lang::{NumeralScheme, Program};

/// How one value is drawn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// A numeral whose value is uniform in `0..=max`.
    Numeral { max: u64 },
    /// `class(args…)` with each argument drawn from its own shape.
    Ctor { class: String, args: Vec<Shape> },
    /// Any term over `ctors`, at most `max_depth` constructors deep.
    Random { ctors: Vec<(String, usize)>, max_depth: u32 },
}

impl Shape {
    /// Receiver shape for a class: its attributes hold numerals.
    pub fn instance(p: &Program, class: &str, max: u64) -> Option<Shape> {
        let c = p.class(class)?;
        Some(Shape::Ctor {
            class: class.to_string(),
            args: vec![Shape::Numeral { max }; c.arity()],
        })
    }

    /// Random terms over every constructor of `p`.
    pub fn any(p: &Program, max_depth: u32) -> Shape {
        Shape::Random {
            ctors: p.constructors(),
            max_depth,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObjectSampler {
    pub seed: u64,
    pub count: usize,
    scheme: NumeralScheme,
    rng: ChaCha8Rng,
}

impl ObjectSampler {
    pub fn new(seed: u64, count: usize, scheme: NumeralScheme) -> Self {
        ObjectSampler {
            seed,
            count,
            scheme,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_program(p: &Program, seed: u64, count: usize) -> Self {
        ObjectSampler::new(seed, count, p.numerals.clone())
    }

    pub fn draw(&mut self, shape: &Shape) -> ObjectValue {
        match shape {
            Shape::Numeral { max } => {
                let n = self.rng.gen_range(0..=*max);
                numeral_encode(&BigUint::from(n), &self.scheme)
            }
            Shape::Ctor { class, args } => {
                let vs = args.iter().map(|s| self.draw(s)).collect();
                ObjectValue::new(class.as_str().into(), vs)
            }
            Shape::Random { ctors, max_depth } => self.random_term(ctors, *max_depth),
        }
    }

    pub fn draw_all(&mut self, shapes: &[Shape]) -> Vec<ObjectValue> {
        shapes.iter().map(|s| self.draw(s)).collect()
    }

    fn random_term(&mut self, ctors: &[(String, usize)], depth: u32) -> ObjectValue {
        let leaves: Vec<&(String, usize)> = ctors.iter().filter(|c| c.1 == 0).collect();
        let pick = if depth == 0 && !leaves.is_empty() {
            leaves[self.rng.gen_range(0..leaves.len())]
        } else {
            &ctors[self.rng.gen_range(0..ctors.len())]
        };
        let children = (0..pick.1)
            .map(|_| self.random_term(ctors, depth.saturating_sub(1)))
            .collect();
        ObjectValue::new(pick.0.as_str().into(), children)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn deterministic_for_a_seed() {
        let p = parse_program(crate::fixtures::POSITION_OO, "t").unwrap();
        let shape = Shape::any(&p, 8);
        let mut a = ObjectSampler::for_program(&p, 7, 0);
        let mut b = ObjectSampler::for_program(&p, 7, 0);
        for _ in 0..50 {
            assert_eq!(a.draw(&shape), b.draw(&shape));
        }
    }

    #[test]
    fn shapes_respect_bounds() {
        let p = parse_program(crate::fixtures::POSITION_OO, "t").unwrap();
        let mut s = ObjectSampler::for_program(&p, 1, 0);
        let pos = Shape::instance(&p, "Position", 5).unwrap();
        for _ in 0..100 {
            let v = s.draw(&pos);
            assert_eq!(v.ctor(), "Position");
            assert!(v.size() <= 11);
            let n = s.draw(&Shape::Numeral { max: 100 });
            assert!(n.size() <= 100);
        }
        let deep = Shape::any(&p, 3);
        for _ in 0..100 {
            fn depth(v: &ObjectValue) -> u32 {
                v.children().iter().map(|c| 1 + depth(c)).max().unwrap_or(0)
            }
            assert!(depth(&s.draw(&deep)) <= 3);
        }
    }
}
