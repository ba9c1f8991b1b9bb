//! Generalizes satisfying assignments of Boolean combinations of linear
//! constraints into trapezoidal regions, restricts those regions so they can
//! be sampled without backtracking (including integer variables), and draws
//! high-rate streams of satisfying vectors for fuzzing.
//!
//! The pipeline is `generalize` → `restrict` → `sample`:
//!
//! - [`generalizer::generalize`] turns a formula and a reference vector into
//!   a [`Region`] that agrees with the formula at the reference vector and
//!   under-approximates it conservatively everywhere else.
//! - [`restrictor::restrict`] post-processes a trapezoid into a restricted
//!   trapezoid plus a change of basis so that ascending-dimension sampling
//!   never hits an unsatisfiable bound, even for integer variables.
//! - [`sampler::Sampler`] draws reproducible, type-consistent vectors and
//!   maps them back to the original basis.
//!
//! All arithmetic is exact arbitrary-precision rational; there is no
//! floating point anywhere in the pipeline.

pub mod core;
pub mod generalizer;
pub mod oracle;
pub mod parser;
pub mod restrictor;
pub mod sampler;

pub use crate::core::{
    rat, rat_int, Bound, Dim, EvalError, Formula, Interval, LinearRelation, Poly, Rational, RelOp,
    Region, Sign, Trapezoid, VarTable, VarTableError, VarType, Vector,
};
