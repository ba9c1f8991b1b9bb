use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::core::{Bound, Dim, Interval, Poly, Rational, Trapezoid, VarTable, Vector};

use super::RestrictError;

/// Dimension-preserving triangular variable substitution: each variable
/// `x_i` maps to `a_i·x_i + Q_i` with `a_i` a positive integer and
/// `dim(Q_i) < i`. Dimensions without an entry map to themselves.
///
/// Applied to a vector it maps the restricted sampling basis back to the
/// original one; composing with a later substitution keeps that direction.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ChangeOfBasis {
    subst: BTreeMap<Dim, Poly>,
}

impl ChangeOfBasis {
    pub fn identity() -> Self {
        ChangeOfBasis::default()
    }

    pub fn is_identity(&self) -> bool {
        self.subst.is_empty()
    }

    fn insert(&mut self, d: Dim, e: Poly) {
        debug_assert_eq!(e.dim(), d.index(), "substitution must preserve dimension");
        debug_assert!(
            e.coeff(d).is_integer() && e.coeff(d).is_positive(),
            "leading coefficient must be a positive integer"
        );
        if e != Poly::var(d) {
            self.subst.insert(d, e);
        }
    }

    /// The image `E_d` of `x_d`.
    pub fn substitution(&self, d: Dim) -> Poly {
        self.subst.get(&d).cloned().unwrap_or_else(|| Poly::var(d))
    }

    /// Dimensions with a non-identity image.
    pub fn touched_dims(&self) -> impl Iterator<Item = Dim> + '_ {
        self.subst.keys().copied()
    }

    /// Homomorphic application: `σ(c_0 + Σ c_i·x_i) = c_0 + Σ c_i·σ(x_i)`.
    pub fn apply_poly(&self, p: &Poly) -> Poly {
        let mut acc = Poly::from_constant(p.constant_term().clone());
        for (d, c) in p.terms() {
            match self.subst.get(&d) {
                Some(e) => acc = acc.add(&e.scale(c)),
                None => acc = acc.add(&Poly::term(c.clone(), d)),
            }
        }
        acc
    }

    /// Rewrites `x op P` under the substitution and renormalizes onto `x`:
    /// with `σ(x) = a·x + Q` the bound becomes `x op (σ(P) − Q)/a`, the
    /// relation direction surviving because `a > 0`.
    pub fn apply_bound(&self, b: &Bound) -> Bound {
        let image = self.substitution(b.var());
        let a = image.coeff(b.var());
        let shift = image.sub(&Poly::term(a.clone(), b.var()));
        let poly = self.apply_poly(b.poly()).sub(&shift).scale(&a.recip());
        Bound::new(b.var(), b.op(), poly)
    }

    pub fn apply_interval(&self, iv: &Interval) -> Interval {
        match iv {
            Interval::Single(b) => Interval::single(self.apply_bound(b)),
            Interval::Equality(b) => Interval::equality(self.apply_bound(b)),
            Interval::Pair { lower, upper } => {
                Interval::pair(self.apply_bound(lower), self.apply_bound(upper))
            }
        }
    }

    pub fn apply_trapezoid(&self, t: &Trapezoid) -> Trapezoid {
        Trapezoid::from_intervals(t.intervals().iter().map(|iv| self.apply_interval(iv)).collect())
    }

    /// Sequential composition: the result maps through `next` first and
    /// `self` second, i.e. `result[η] = self[next[η]]`, so an accumulated
    /// basis keeps mapping the newest sampling basis back to the original.
    pub fn compose(&self, next: &ChangeOfBasis) -> ChangeOfBasis {
        let mut out = ChangeOfBasis::identity();
        let dims: std::collections::BTreeSet<Dim> = self
            .subst
            .keys()
            .chain(next.subst.keys())
            .copied()
            .collect();
        for d in dims {
            out.insert(d, next.apply_poly(&self.substitution(d)));
        }
        out
    }

    /// Evaluates the substitution at `w`: component `i` is `E_i[w]`.
    pub fn apply_vector(&self, w: &Vector) -> Vector {
        let mut out = Vector::empty();
        for i in 1..=w.dim_count() {
            let d = Dim::new(i);
            match self.subst.get(&d) {
                Some(e) => out.push(e.eval(w)),
                None => out.push(w.value(d).clone()),
            }
        }
        out
    }

    /// Solves `σ[η] = v` for `η` by the ascending triangular system
    /// `η_i = (v_i − Q_i[η])/a_i`. Fails when an integer dimension would
    /// receive a non-integral value, i.e. `v` lies outside the span.
    pub fn invert_apply(&self, v: &Vector, vars: &VarTable) -> Result<Vector, RestrictError> {
        let mut out = Vector::empty();
        for i in 1..=v.dim_count() {
            let d = Dim::new(i);
            let value = match self.subst.get(&d) {
                None => v.value(d).clone(),
                Some(e) => {
                    let a = e.coeff(d);
                    let shift = e.sub(&Poly::term(a.clone(), d));
                    (v.value(d) - shift.eval(&out)) / a
                }
            };
            if vars.is_integer(d) && !value.is_integer() {
                return Err(RestrictError::SpanViolation { dim: i });
            }
            out.push(value);
        }
        Ok(out)
    }
}

impl fmt::Display for ChangeOfBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "identity");
        }
        let mut first = true;
        for (d, e) in &self.subst {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{d} -> {e}")?;
            first = false;
        }
        Ok(())
    }
}

/// `m | E` for a positive integer modulus and a polynomial with integer
/// coefficients and constant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisibilityConstraint {
    modulus: BigInt,
    expr: Poly,
}

impl DivisibilityConstraint {
    /// Panics unless `modulus >= 1` and `expr` is integral.
    pub fn new(modulus: BigInt, expr: Poly) -> Self {
        assert!(modulus >= BigInt::one(), "modulus must be positive");
        assert!(expr.is_integral(), "divisibility expressions are integral");
        DivisibilityConstraint { modulus, expr }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn expr(&self) -> &Poly {
        &self.expr
    }

    pub fn solved_by(&self, v: &Vector) -> bool {
        let value = self.expr.eval(v);
        value.is_integer() && value.to_integer().is_multiple_of(&self.modulus)
    }
}

impl fmt::Display for DivisibilityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.modulus, self.expr)
    }
}

/// Multiplicative inverse of `a` modulo `m`, for `gcd(a, m) = 1` and
/// `m >= 1`; returns 0 when `m == 1`.
fn invmod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "invmod requires coprime arguments");
    e.x.mod_floor(m)
}

/// Constructs a change of basis `σ` for a solvable divisibility constraint
/// `(m | E)` such that every coefficient of `σ(E)` is divisible by `m` and
/// the span of `σ` covers every solution of the constraint.
///
/// The recursion peels the leading term `E = F + c·x`: with `g = gcd(|c|, m)`,
/// `c = g·c'`, `m = g·m'`, it builds `σ'` for `(g | F)`, divides
/// `F' = σ'(F)/g` exactly, and extends with
/// `σ(x) = m'·x − invmod(c' mod m', m')·F'`. The base case demands `m | c`
/// outright and an unsolvable constraint surfaces there.
pub fn tcob_for_divisibility(dc: &DivisibilityConstraint) -> Result<ChangeOfBasis, RestrictError> {
    build_tcob(dc.modulus(), dc.expr())
}

fn build_tcob(m: &BigInt, e: &Poly) -> Result<ChangeOfBasis, RestrictError> {
    debug_assert!(e.is_integral());
    match e.split_leading() {
        None => {
            let c = e.constant_term().to_integer();
            if c.is_multiple_of(m) {
                Ok(ChangeOfBasis::identity())
            } else {
                Err(RestrictError::UnsolvableDivisibility {
                    modulus: m.clone(),
                    expr: e.to_string(),
                })
            }
        }
        Some((x, coeff, rest)) => {
            let c = coeff.to_integer();
            let g = c.abs().gcd(m);
            let c1 = &c / &g;
            let m1 = m / &g;

            let mut cob = build_tcob(&g, &rest).map_err(|err| match err {
                // Report the original constraint, not the recursive remnant.
                RestrictError::UnsolvableDivisibility { .. } => {
                    RestrictError::UnsolvableDivisibility {
                        modulus: m.clone(),
                        expr: e.to_string(),
                    }
                }
                other => other,
            })?;

            let rest_image = cob
                .apply_poly(&rest)
                .scale(&Rational::from_integer(g.clone()).recip());
            debug_assert!(rest_image.is_integral(), "σ'(F) is exactly divisible by g");

            let inv = invmod(&c1.mod_floor(&m1), &m1);
            let image = Poly::term(Rational::from_integer(m1), x)
                .sub(&rest_image.scale(&Rational::from_integer(inv)));
            cob.insert(x, image);
            Ok(cob)
        }
    }
}

/// Symbolic form of the tcob guarantee: every coefficient and the constant
/// of `p` is divisible by `m`.
pub fn poly_divisible_by(p: &Poly, m: &BigInt) -> bool {
    if !p.is_integral() {
        return false;
    }
    if m.is_zero() {
        return p.is_zero();
    }
    p.constant_term().to_integer().is_multiple_of(m)
        && p.terms().all(|(_, c)| c.to_integer().is_multiple_of(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{rat, rat_int, RelOp, VarType};
    use num_traits::ToPrimitive;

    fn d(i: u32) -> Dim {
        Dim::new(i)
    }

    fn int_poly(constant: i64, terms: &[(u32, i64)]) -> Poly {
        Poly::with_terms(
            rat_int(constant),
            terms.iter().map(|&(i, c)| (d(i), rat_int(c))),
        )
    }

    #[test]
    fn paper_worked_example() {
        // (2 | 1 + x + y) with dim(x) = 1, dim(y) = 2
        let dc = DivisibilityConstraint::new(2.into(), int_poly(1, &[(1, 1), (2, 1)]));
        let cob = tcob_for_divisibility(&dc).unwrap();
        assert_eq!(cob.substitution(d(1)), Poly::var(d(1)));
        assert_eq!(cob.substitution(d(2)), int_poly(-1, &[(2, 2), (1, -1)]));
        // σ(E) = 2y
        let image = cob.apply_poly(dc.expr());
        assert_eq!(image, int_poly(0, &[(2, 2)]));
        assert!(poly_divisible_by(&image, dc.modulus()));
    }

    #[test]
    fn unit_modulus_is_identity() {
        let dc = DivisibilityConstraint::new(1.into(), int_poly(7, &[(1, 3), (3, -2)]));
        assert!(tcob_for_divisibility(&dc).unwrap().is_identity());
    }

    #[test]
    fn shared_factor_example() {
        // (4 | 2x + 2): solutions are odd x, image of x -> 2x - 1.
        let dc = DivisibilityConstraint::new(4.into(), int_poly(2, &[(1, 2)]));
        let cob = tcob_for_divisibility(&dc).unwrap();
        assert_eq!(cob.substitution(d(1)), int_poly(-1, &[(1, 2)]));
        let image = cob.apply_poly(dc.expr());
        assert_eq!(image, int_poly(0, &[(1, 4)]));

        // Brute force: the odd integers are exactly the span restricted to
        // solutions.
        for x in -20i64..=20 {
            let v = Vector::from_i64s(&[x]);
            let vars = VarTable::with_integer_dims(1);
            let solves = dc.solved_by(&v);
            let inverted = cob.invert_apply(&v, &vars);
            assert_eq!(solves, x.rem_euclid(2) == 1);
            assert_eq!(inverted.is_ok(), solves, "span must match solutions at {x}");
            if let Ok(eta) = inverted {
                assert_eq!(cob.apply_vector(&eta), v);
            }
        }
    }

    #[test]
    fn unsolvable_constraint_is_reported() {
        // 2 | 2x + 1 has no solutions.
        let dc = DivisibilityConstraint::new(2.into(), int_poly(1, &[(1, 2)]));
        let err = tcob_for_divisibility(&dc).unwrap_err();
        assert!(matches!(err, RestrictError::UnsolvableDivisibility { .. }));
    }

    #[test]
    fn apply_poly_identity_and_examples() {
        let cob = ChangeOfBasis::identity();
        let p = int_poly(3, &[(2, 5), (1, -1)]);
        assert_eq!(cob.apply_poly(&p), p);

        // σ(x) = 2x - 1 on x + 1 gives 2x.
        let dc = DivisibilityConstraint::new(2.into(), int_poly(1, &[(1, 1)]));
        let cob = tcob_for_divisibility(&dc).unwrap();
        assert_eq!(cob.substitution(d(1)), int_poly(-1, &[(1, 2)]));
        assert_eq!(cob.apply_poly(&int_poly(1, &[(1, 1)])), int_poly(0, &[(1, 2)]));
    }

    #[test]
    fn substitution_lemma_on_vectors() {
        // E[σ[η]] = σ(E)[η] for the paper example basis.
        let dc = DivisibilityConstraint::new(2.into(), int_poly(1, &[(1, 1), (2, 1)]));
        let cob = tcob_for_divisibility(&dc).unwrap();
        let e = int_poly(4, &[(2, 3), (1, -2)]);
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                let eta = Vector::from_i64s(&[x, y]);
                assert_eq!(e.eval(&cob.apply_vector(&eta)), cob.apply_poly(&e).eval(&eta));
            }
        }
    }

    #[test]
    fn apply_bound_renormalizes() {
        // σ(x) = 2x - 1 on (x <= 5) gives (x <= 3).
        let mut cob = ChangeOfBasis::identity();
        cob.insert(d(1), int_poly(-1, &[(1, 2)]));
        let got = cob.apply_bound(&Bound::new(d(1), RelOp::Leq, Poly::from_constant(rat_int(5))));
        assert_eq!(got, Bound::new(d(1), RelOp::Leq, Poly::from_constant(rat_int(3))));

        // σ(y) = 2y - x - 1 on (y >= x) gives y >= (2x + 1)/2, by moving the
        // shift across and dividing by the positive leading coefficient.
        let mut cob = ChangeOfBasis::identity();
        cob.insert(d(2), int_poly(-1, &[(2, 2), (1, -1)]));
        let got = cob.apply_bound(&Bound::new(d(2), RelOp::Geq, Poly::var(d(1))));
        let want = Bound::new(
            d(2),
            RelOp::Geq,
            Poly::with_terms(rat(1, 2), [(d(1), rat_int(1))]),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn compose_identity_laws_and_substitution() {
        let mut sigma1 = ChangeOfBasis::identity();
        sigma1.insert(d(1), int_poly(-1, &[(1, 2)]));
        let id = ChangeOfBasis::identity();
        assert_eq!(id.compose(&sigma1), sigma1);
        assert_eq!(sigma1.compose(&id), sigma1);

        let mut sigma2 = ChangeOfBasis::identity();
        sigma2.insert(d(1), int_poly(0, &[(1, 3)]));
        let composed = sigma1.compose(&sigma2);
        assert_eq!(composed.substitution(d(1)), int_poly(-1, &[(1, 6)]));
        // Vector semantics: composed[η] = σ1[σ2[η]].
        let eta = Vector::from_i64s(&[1]);
        assert_eq!(
            composed.apply_vector(&eta),
            sigma1.apply_vector(&sigma2.apply_vector(&eta))
        );
        assert_eq!(composed.apply_vector(&eta).value(d(1)).to_integer().to_i64(), Some(5));
    }

    #[test]
    fn invert_apply_solves_triangular_system() {
        let vars = VarTable::new([("x", VarType::Integer), ("y", VarType::Integer)]).unwrap();
        let id = ChangeOfBasis::identity();
        let v = Vector::from_i64s(&[4, -2]);
        assert_eq!(id.invert_apply(&v, &vars).unwrap(), v);

        // σ: x -> x, y -> 2y - x - 1; v = (1, 0) inverts to (1, 1).
        let mut cob = ChangeOfBasis::identity();
        cob.insert(d(2), int_poly(-1, &[(2, 2), (1, -1)]));
        let eta = cob.invert_apply(&Vector::from_i64s(&[1, 0]), &vars).unwrap();
        assert_eq!(eta, Vector::from_i64s(&[1, 1]));
        assert_eq!(cob.apply_vector(&eta), Vector::from_i64s(&[1, 0]));
    }

    #[test]
    fn invert_apply_rejects_span_violations() {
        let vars = VarTable::with_integer_dims(1);
        let mut cob = ChangeOfBasis::identity();
        cob.insert(d(1), int_poly(-1, &[(1, 2)]));
        let err = cob.invert_apply(&Vector::from_i64s(&[2]), &vars).unwrap_err();
        assert_eq!(err, RestrictError::SpanViolation { dim: 1 });
    }
}
