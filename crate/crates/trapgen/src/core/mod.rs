//! Exact-arithmetic problem representations: polynomials, vectors, bounds,
//! intervals, trapezoids, regions, and formulas.

mod formula;
mod poly;
mod trapezoid;
mod vars;
mod vector;

pub use formula::{Formula, LinearRelation, RelOp};
pub use poly::{rat, rat_int, EvalError, Poly, Rational};
pub use trapezoid::{Bound, Interval, Region, Sign, Trapezoid};
pub use vars::{Dim, VarTable, VarTableError, VarType};
pub use vector::Vector;

#[cfg(test)]
mod prop_tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..=50, 1i64..=12).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_poly(max_dim: u32) -> impl Strategy<Value = Poly> {
        (
            arb_rational(),
            proptest::collection::vec((1..=max_dim, arb_rational()), 0..4),
        )
            .prop_map(|(c, terms)| {
                Poly::with_terms(c, terms.into_iter().map(|(i, q)| (Dim::new(i), q)))
            })
    }

    fn arb_vector(len: u32) -> impl Strategy<Value = Vector> {
        proptest::collection::vec(arb_rational(), len as usize).prop_map(Vector::new)
    }

    proptest! {
        #[test]
        fn combine_is_exactly_linear(
            a in arb_rational(),
            b in arb_rational(),
            p in arb_poly(4),
            q in arb_poly(4),
            v in arb_vector(4),
        ) {
            let lhs = Poly::combine(&a, &p, &b, &q).eval(&v);
            let rhs = &a * p.eval(&v) + &b * q.eval(&v);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lcd_clears_denominators(p in arb_poly(4)) {
            let lcd = p.lcd();
            prop_assert!(lcd > BigInt::from(0));
            prop_assert!(p.scale(&Rational::from_integer(lcd)).is_integral());
        }

        #[test]
        fn eval_ignores_dimensions_above_poly(
            p in arb_poly(3),
            v in arb_vector(3),
            extra in arb_rational(),
        ) {
            let mut w = v.clone();
            w.push(extra);
            prop_assert_eq!(p.eval(&v), p.eval(&w));
        }

        #[test]
        fn region_complement_negates(
            p in arb_poly(2),
            v in arb_vector(3),
        ) {
            let body = Trapezoid::single_bound(Bound::new(Dim::new(3), RelOp::Leq, p));
            let region = Region::positive(body);
            prop_assert_eq!(region.complement().eval(&v), !region.eval(&v));
        }
    }
}
