//! Exact Max-Poly{ℝ⁺} algebra: expressions, normal forms and comparison.

pub mod compare;
pub mod expr;
pub mod normal;

pub use compare::{
    additive_constant, compare_geq, dominates, has_subterm_property, is_additive, random_point,
    random_rational, CompareConfig, CompareVerdict, Witness,
};
pub use expr::{point, rat, ratio, MaxPoly, MissingVariable, NegativeConstant, Point, Rational};
pub use normal::{normalize, Monomial, NormalForm, Polynomial};
