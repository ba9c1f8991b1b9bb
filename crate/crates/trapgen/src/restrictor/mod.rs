//! Restriction: post-processes a trapezoid into a restricted trapezoid plus
//! a change of basis so that ascending-dimension sampling never encounters
//! an unsatisfiable bound, even for integer variables.
//!
//! The pass walks the intervals from the highest dimension down. Each
//! interval goes through bound fixing (strict integer bounds become
//! inclusive), integer equality elimination (a change of basis makes the
//! equality's polynomial integral), and interval restriction (the remaining
//! trapezoid is narrowed so the interval stays satisfiable under every
//! assignment). Whenever a step introduces a change of basis it is applied
//! to everything still in play — including the intervals already emitted,
//! whose bounding polynomials may mention the rewritten variables — and the
//! reference vector is mapped into the new basis.

mod basis;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::core::{
    Bound, Interval, LinearRelation, Rational, RelOp, Trapezoid, VarTable, Vector,
};
use crate::generalizer::{normalize_relation, trapezoid_intersect};

pub use basis::{poly_divisible_by, tcob_for_divisibility, ChangeOfBasis, DivisibilityConstraint};

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum RestrictError {
    #[error("divisibility constraint ({modulus} | {expr}) has no solution")]
    UnsolvableDivisibility { modulus: BigInt, expr: String },
    #[error("vector lies outside the span of the change of basis at dimension {dim}")]
    SpanViolation { dim: u32 },
}

/// Output of [`restrict`]: the restricted trapezoid, the accumulated change
/// of basis mapping samples back to the original space, and the reference
/// vector expressed in the restricted basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictionResult {
    pub trapezoid: Trapezoid,
    pub basis: ChangeOfBasis,
    pub reference: Vector,
}

/// Result of one restriction step over a single interval.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepOutcome {
    pub interval: Interval,
    pub remaining: Trapezoid,
    pub basis: ChangeOfBasis,
    pub reference: Vector,
    /// The change of basis introduced by this step alone (identity when the
    /// step rewrote nothing); the driver applies it to already-processed
    /// intervals.
    pub step_cob: ChangeOfBasis,
}

impl StepOutcome {
    fn unchanged(
        interval: Interval,
        remaining: Trapezoid,
        basis: &ChangeOfBasis,
        reference: &Vector,
    ) -> Self {
        StepOutcome {
            interval,
            remaining,
            basis: basis.clone(),
            reference: reference.clone(),
            step_cob: ChangeOfBasis::identity(),
        }
    }
}

/// Bound fixing: on integer variables, strict bounds become inclusive by
/// shifting one lattice step of the bounding polynomial. Since everything
/// below an integer variable is integer-valued, `P` evaluates in
/// `(1/lcd(P))·ℤ`, so `x < P` is equivalent to `x <= P - 1/lcd(P)` and
/// `x > P` to `x >= P + 1/lcd(P)`. Rational variables are untouched.
pub fn bound_fix(iv: &Interval, vars: &VarTable) -> Interval {
    if !vars.is_integer(iv.var()) {
        return iv.clone();
    }
    let fix = |b: &Bound| -> Bound {
        let step = Rational::from_integer(b.poly().lcd()).recip();
        match b.op() {
            RelOp::Lt => Bound::new(b.var(), RelOp::Leq, b.poly().add_constant(&-step)),
            RelOp::Gt => Bound::new(b.var(), RelOp::Geq, b.poly().add_constant(&step)),
            _ => b.clone(),
        }
    };
    match iv {
        Interval::Single(b) => Interval::single(fix(b)),
        Interval::Equality(b) => Interval::Equality(b.clone()),
        Interval::Pair { lower, upper } => Interval::pair(fix(lower), fix(upper)),
    }
}

/// Intersects a domain restriction, known to hold at `vref`, into `t`.
fn intersect_restriction(t: &Trapezoid, rel: LinearRelation, vref: &Vector) -> Trapezoid {
    let region = normalize_relation(&rel, vref);
    debug_assert!(
        region.is_positive(),
        "domain restrictions are true at the reference vector"
    );
    trapezoid_intersect(t, region.body(), vref)
}

/// Integer equality: rewrites `x_n = P` with `lcd(P) = D > 1` through the
/// change of basis for `(D | D·P)` so the equality's polynomial becomes
/// integral and every assignment of the lower variables yields an integer
/// `x_n`. Trivial when `D = 1`.
pub fn integer_equality_step(
    iv: Interval,
    remaining: &Trapezoid,
    acc: &ChangeOfBasis,
    vref: &Vector,
    vars: &VarTable,
) -> Result<StepOutcome, RestrictError> {
    let bound = match &iv {
        Interval::Equality(b) if vars.is_integer(b.var()) => b,
        _ => return Ok(StepOutcome::unchanged(iv, remaining.clone(), acc, vref)),
    };
    let denom = bound.poly().lcd();
    if denom.is_one() {
        return Ok(StepOutcome::unchanged(iv, remaining.clone(), acc, vref));
    }

    let expr = bound.poly().scale(&Rational::from_integer(denom.clone()));
    let dc = DivisibilityConstraint::new(denom, expr);
    debug_assert!(dc.solved_by(vref), "the reference vector witnesses solvability");
    let step = tcob_for_divisibility(&dc)?;

    let interval = step.apply_interval(&iv);
    debug_assert!(
        matches!(&interval, Interval::Equality(b) if b.poly().lcd().is_one()),
        "the rewritten equality is integral"
    );
    let remaining = step.apply_trapezoid(remaining);
    let reference = step.invert_apply(vref, vars)?;
    Ok(StepOutcome {
        interval,
        remaining,
        basis: acc.compose(&step),
        reference,
        step_cob: step,
    })
}

/// Interval restriction: narrows the remaining trapezoid so a double-bounded
/// interval stays satisfiable under every assignment.
///
/// - For rational variables, or integer variables where either bounding
///   polynomial is integral, intersecting `P^L <= P^U` suffices (strict when
///   either retained bound is strict).
/// - For integer variables with fractional bounds on both sides,
///   `P^L + 1 <= P^U` guarantees an integer in between; it is used whenever
///   it holds at the reference vector.
/// - Otherwise the interval pinches a single integer at the reference: the
///   lower bound is tightened to pass through it, a change of basis makes
///   the tightened bound integral, and the (rewritten) width constraint is
///   intersected.
pub fn interval_restrict_step(
    iv: Interval,
    remaining: &Trapezoid,
    acc: &ChangeOfBasis,
    vref: &Vector,
    vars: &VarTable,
) -> Result<StepOutcome, RestrictError> {
    let (lower, upper) = match &iv {
        Interval::Pair { lower, upper } => (lower, upper),
        _ => return Ok(StepOutcome::unchanged(iv, remaining.clone(), acc, vref)),
    };
    let var = iv.var();
    let integer = vars.is_integer(var);
    let lcd_lower = lower.poly().lcd();
    let lcd_upper = upper.poly().lcd();

    if !integer || lcd_lower.is_one() || lcd_upper.is_one() {
        let op = if lower.op().is_strict() || upper.op().is_strict() {
            RelOp::Lt
        } else {
            RelOp::Leq
        };
        let rel = LinearRelation::new(lower.poly().clone(), op, upper.poly().clone());
        let remaining = intersect_restriction(remaining, rel, vref);
        return Ok(StepOutcome::unchanged(iv, remaining, acc, vref));
    }

    // Bound fixing has already made integer bounds inclusive.
    debug_assert_eq!(lower.op(), RelOp::Geq);
    debug_assert_eq!(upper.op(), RelOp::Leq);

    let lower_at_v = lower.poly().eval(vref);
    let upper_at_v = upper.poly().eval(vref);
    if &lower_at_v + Rational::one() <= upper_at_v {
        let rel = LinearRelation::new(
            lower.poly().add_constant(&Rational::one()),
            RelOp::Leq,
            upper.poly().clone(),
        );
        let remaining = intersect_restriction(remaining, rel, vref);
        return Ok(StepOutcome::unchanged(iv, remaining, acc, vref));
    }

    // The interval holds exactly one integer at the reference: x_n itself.
    // Tighten the lower bound to pass through it, then change basis so the
    // tightened bound is always integral.
    let shift = vref.value(var) - &lower_at_v;
    let tightened = lower.poly().add_constant(&shift);
    let denom = tightened.lcd();
    let dc = DivisibilityConstraint::new(
        denom.clone(),
        tightened.scale(&Rational::from_integer(denom)),
    );
    debug_assert!(dc.solved_by(vref));
    let step = tcob_for_divisibility(&dc)?;

    let new_lower = step.apply_poly(&tightened);
    debug_assert!(new_lower.is_integral(), "the tightened bound is integral");
    let new_upper = step.apply_poly(upper.poly());
    let interval = Interval::pair(
        Bound::new(var, RelOp::Geq, new_lower.clone()),
        Bound::new(var, RelOp::Leq, new_upper.clone()),
    );

    let remaining = step.apply_trapezoid(remaining);
    let reference = step.invert_apply(vref, vars)?;
    let rel = LinearRelation::new(new_lower, RelOp::Leq, new_upper);
    let remaining = intersect_restriction(&remaining, rel, &reference);

    Ok(StepOutcome {
        interval,
        remaining,
        basis: acc.compose(&step),
        reference,
        step_cob: step,
    })
}

/// Restricts `t` relative to the satisfying reference vector `v`.
///
/// Intervals are processed in descending dimension order through bound
/// fixing, integer equality, and interval restriction; domain restrictions
/// are intersected into the not-yet-processed remainder, and every change
/// of basis is applied to the processed prefix as well so the final
/// trapezoid lives entirely in the final basis.
pub fn restrict(
    t: &Trapezoid,
    v: &Vector,
    vars: &VarTable,
) -> Result<RestrictionResult, RestrictError> {
    debug_assert!(t.eval(v), "the reference vector must satisfy the trapezoid");
    debug_assert!(v.is_consistent(vars));

    let mut emitted: Vec<Interval> = Vec::new();
    let mut queue: Vec<Interval> = t.intervals().to_vec();
    let mut basis = ChangeOfBasis::identity();
    let mut vref = v.clone();

    while !queue.is_empty() {
        let iv = bound_fix(&queue.remove(0), vars);
        let remaining = Trapezoid::from_intervals(queue);

        let out = integer_equality_step(iv, &remaining, &basis, &vref, vars)?;
        rewrite_emitted(&mut emitted, &out.step_cob);
        let out = interval_restrict_step(out.interval, &out.remaining, &out.basis, &out.reference, vars)?;
        rewrite_emitted(&mut emitted, &out.step_cob);

        emitted.push(out.interval);
        queue = out.remaining.into_intervals();
        basis = out.basis;
        vref = out.reference;
    }

    let trapezoid = Trapezoid::from_intervals(emitted);
    debug_assert!(trapezoid.eval(&vref), "restriction preserves the reference");
    Ok(RestrictionResult {
        trapezoid,
        basis,
        reference: vref,
    })
}

fn rewrite_emitted(emitted: &mut [Interval], step: &ChangeOfBasis) {
    if step.is_identity() {
        return;
    }
    for iv in emitted {
        *iv = step.apply_interval(iv);
    }
}
