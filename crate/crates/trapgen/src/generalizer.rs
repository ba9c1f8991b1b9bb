//! Generalization of a formula and reference vector into a trapezoidal
//! region.
//!
//! The produced region `R` satisfies, for the input formula `F` and
//! reference vector `v`:
//!
//! - `F[v] = R[v]` (agreement at the reference vector), and
//! - when `F[v]` holds, `R ⇒ F` everywhere; when it does not, `F ⇒ R`
//!   everywhere (conservative under-approximation in both directions).
//!
//! Every bound placed in the body of a region is true at the reference
//! vector, which is what lets bound intersection dispatch on evaluations at
//! `v` alone.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::core::{
    Bound, Dim, Formula, Interval, LinearRelation, Rational, RelOp, Region, Trapezoid,
    Vector,
};

/// Outcome of intersecting two bounds on the same variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoundMerge {
    /// One bound subsumes the other; the residual side relation (if any)
    /// relates the two bounding polynomials and must be normalized and
    /// intersected in turn.
    Keep {
        kept: Bound,
        residual: Option<LinearRelation>,
    },
    /// An upper and a lower bound coexist; the caller pairs them into an
    /// interval.
    Complementary,
}

/// Generalizes a single linear relation relative to `v`.
///
/// Constant relations collapse to the empty trapezoid or its complement.
/// Otherwise the relation is normalized onto its highest-dimension variable;
/// if it holds at `v` the result is a positive singleton region, and if not,
/// the complement of a singleton whose bound does hold at `v` (false
/// equalities pick the strict side containing `v`).
pub fn normalize_relation(rel: &LinearRelation, v: &Vector) -> Region {
    // Express as `diff op 0` with op in {=, <, <=}.
    let (diff, op) = match rel.op {
        RelOp::Eq => (rel.lhs.sub(&rel.rhs), RelOp::Eq),
        RelOp::Lt => (rel.lhs.sub(&rel.rhs), RelOp::Lt),
        RelOp::Leq => (rel.lhs.sub(&rel.rhs), RelOp::Leq),
        RelOp::Gt => (rel.rhs.sub(&rel.lhs), RelOp::Lt),
        RelOp::Geq => (rel.rhs.sub(&rel.lhs), RelOp::Leq),
    };

    if diff.is_constant() {
        let truth = op.holds(diff.constant_term(), &Rational::zero());
        return if truth {
            Region::positive(Trapezoid::empty())
        } else {
            Region::negative(Trapezoid::empty())
        };
    }

    // Isolate the leading variable: diff = c·x + rest, so `diff op 0`
    // becomes `x op' -rest/c` with op' flipped when c is negative.
    let (var, coeff, rest) = diff.split_leading().expect("non-constant polynomial");
    let poly = rest.scale(&(-coeff.recip()));
    let bound_op = if coeff.is_positive() { op } else { op.swapped() };

    let truth = bound_op.holds(v.value(var), &poly.eval(v));
    if truth {
        Region::positive(Trapezoid::single_bound(Bound::new(var, bound_op, poly)))
    } else {
        let dual = match bound_op {
            RelOp::Lt => RelOp::Geq,
            RelOp::Leq => RelOp::Gt,
            RelOp::Gt => RelOp::Leq,
            RelOp::Geq => RelOp::Lt,
            RelOp::Eq => {
                if v.value(var) > &poly.eval(v) {
                    RelOp::Gt
                } else {
                    RelOp::Lt
                }
            }
        };
        Region::negative(Trapezoid::single_bound(Bound::new(var, dual, poly)))
    }
}

/// Intersects two normalized bounds on the same variable, both true at `v`.
///
/// Two like-sided bounds keep the one that is tighter at `v` (a strict bound
/// wins ties against an inclusive one) and emit the corresponding side
/// relation between the bounding polynomials. Equalities always win and
/// relate their polynomial to the other bound. An upper and a lower bound
/// are complementary and are kept as a pair.
pub fn intersect_same_var(b1: &Bound, b2: &Bound, v: &Vector) -> BoundMerge {
    assert_eq!(b1.var(), b2.var(), "bounds must share a variable");
    debug_assert!(b1.holds_at(v) && b2.holds_at(v));

    match (b1.op(), b2.op()) {
        (RelOp::Eq, _) => BoundMerge::Keep {
            kept: b1.clone(),
            residual: Some(equality_residual(b1, b2)),
        },
        (_, RelOp::Eq) => BoundMerge::Keep {
            kept: b2.clone(),
            residual: Some(equality_residual(b2, b1)),
        },
        (a, b) if a.is_upper() && b.is_upper() => merge_like_sided(b1, b2, v, RelOp::Leq),
        (a, b) if a.is_lower() && b.is_lower() => merge_like_sided(b1, b2, v, RelOp::Geq),
        _ => BoundMerge::Complementary,
    }
}

/// Residual for `(x = P) ∩ (x op Q)`: the equality stands in for `x`.
fn equality_residual(eq: &Bound, other: &Bound) -> LinearRelation {
    LinearRelation::new(eq.poly().clone(), other.op(), other.poly().clone())
}

/// Shared upper/upper and lower/lower logic; `keep_cmp` is `<=` for upper
/// bounds and `>=` for lower bounds (keep the bound that is at least as
/// tight at `v`).
fn merge_like_sided(b1: &Bound, b2: &Bound, v: &Vector, keep_cmp: RelOp) -> BoundMerge {
    let p1 = b1.poly().eval(v);
    let p2 = b2.poly().eval(v);

    // Prefer the tighter bound at `v`; on a value tie a strict bound beats
    // an inclusive one so the residual below still holds at `v` (the gap in
    // the strict/inclusive rule is covered by its mixed counterpart).
    let keep_first = if p1 == p2 {
        b1.op().is_strict() || !b2.op().is_strict()
    } else {
        keep_cmp.holds(&p1, &p2)
    };
    let (kept, other) = if keep_first { (b1, b2) } else { (b2, b1) };

    // An inclusive bound only beats a strict one when it is strictly
    // tighter, and then the residual is strict too.
    let residual_op = if !kept.op().is_strict() && other.op().is_strict() {
        if keep_cmp == RelOp::Leq {
            RelOp::Lt
        } else {
            RelOp::Gt
        }
    } else {
        keep_cmp
    };

    BoundMerge::Keep {
        kept: kept.clone(),
        residual: Some(LinearRelation::new(
            kept.poly().clone(),
            residual_op,
            other.poly().clone(),
        )),
    }
}

/// Per-variable accumulator used while reducing a multiset of bounds.
#[derive(Default)]
enum VarState {
    #[default]
    Empty,
    Eq(Bound),
    Sides {
        lower: Option<Bound>,
        upper: Option<Bound>,
    },
}

impl VarState {
    fn absorb(&mut self, bound: Bound, v: &Vector, residuals: &mut Vec<LinearRelation>) {
        let state = std::mem::take(self);
        *self = match state {
            VarState::Empty => match bound.op() {
                RelOp::Eq => VarState::Eq(bound),
                op if op.is_upper() => VarState::Sides {
                    lower: None,
                    upper: Some(bound),
                },
                _ => VarState::Sides {
                    lower: Some(bound),
                    upper: None,
                },
            },
            VarState::Eq(eq) => {
                match intersect_same_var(&eq, &bound, v) {
                    BoundMerge::Keep { kept, residual } => {
                        residuals.extend(residual);
                        VarState::Eq(kept)
                    }
                    BoundMerge::Complementary => unreachable!("equality merges never pair"),
                }
            }
            VarState::Sides { lower, upper } => {
                if bound.op() == RelOp::Eq {
                    // The equality subsumes both sides.
                    for side in [&lower, &upper].into_iter().flatten() {
                        residuals.push(equality_residual(&bound, side));
                    }
                    VarState::Eq(bound)
                } else if bound.op().is_upper() {
                    let upper = Self::merge_side(upper, bound, v, residuals);
                    VarState::Sides {
                        lower,
                        upper: Some(upper),
                    }
                } else {
                    let lower = Self::merge_side(lower, bound, v, residuals);
                    VarState::Sides {
                        lower: Some(lower),
                        upper,
                    }
                }
            }
        };
    }

    fn merge_side(
        existing: Option<Bound>,
        bound: Bound,
        v: &Vector,
        residuals: &mut Vec<LinearRelation>,
    ) -> Bound {
        match existing {
            None => bound,
            Some(existing) => match intersect_same_var(&existing, &bound, v) {
                BoundMerge::Keep { kept, residual } => {
                    residuals.extend(residual);
                    kept
                }
                BoundMerge::Complementary => unreachable!("like-sided merges never pair"),
            },
        }
    }

    fn into_interval(self) -> Option<Interval> {
        match self {
            VarState::Empty => None,
            VarState::Eq(b) => Some(Interval::equality(b)),
            VarState::Sides { lower, upper } => match (lower, upper) {
                (Some(lower), Some(upper)) => Some(Interval::pair(lower, upper)),
                (Some(b), None) | (None, Some(b)) => Some(Interval::single(b)),
                (None, None) => None,
            },
        }
    }
}

/// Fixed point of pairwise intersection over the merged bounds of two
/// trapezoids, all of which must hold at `v`.
///
/// Bounds are bucketed by variable and processed from the highest dimension
/// down; each reduction's residual is normalized into a bound on a strictly
/// lower dimension (Lemma 1's termination measure) and enqueued for the pass
/// to pick up when it reaches that dimension.
pub fn trapezoid_intersect(a: &Trapezoid, b: &Trapezoid, v: &Vector) -> Trapezoid {
    let mut pending: BTreeMap<Dim, Vec<Bound>> = BTreeMap::new();
    for bound in a.bounds().chain(b.bounds()) {
        pending.entry(bound.var()).or_default().push(bound.clone());
    }

    let mut intervals = Vec::new();
    while let Some((var, bucket)) = pending.pop_last() {
        let mut state = VarState::Empty;
        let mut residuals = Vec::new();
        let mut queue: Vec<Bound> = bucket;
        while let Some(bound) = queue.pop() {
            state.absorb(bound, v, &mut residuals);
            for rel in residuals.drain(..) {
                let region = normalize_relation(&rel, v);
                debug_assert!(
                    region.is_positive(),
                    "rule side conditions guarantee residuals true at v"
                );
                for reduced in region.body().bounds() {
                    // Lemma 1: every rewrite strictly decreases the sum of
                    // bound dimensions.
                    debug_assert!(
                        reduced.dim() < var.index(),
                        "intersection rewrite must strictly decrease the dimension measure"
                    );
                    if reduced.var() == var {
                        queue.push(reduced.clone());
                    } else {
                        pending
                            .entry(reduced.var())
                            .or_default()
                            .push(reduced.clone());
                    }
                }
            }
        }
        intervals.extend(state.into_interval());
    }

    Trapezoid::from_intervals(intervals)
}

/// Region intersection: a negative region absorbs the intersection, with
/// the left argument taking precedence when both are negative; two positive
/// regions intersect their trapezoids.
pub fn region_intersect(a: Region, b: Region, v: &Vector) -> Region {
    if !a.is_positive() {
        return a;
    }
    if !b.is_positive() {
        return b;
    }
    Region::positive(trapezoid_intersect(a.body(), b.body(), v))
}

/// Generalizes `v` with respect to `f` by structural recursion: atoms are
/// normalized, conjunction intersects, negation complements, and
/// disjunction is the complement of the intersection of the complements.
/// N-ary connectives fold left to right.
pub fn generalize(f: &Formula, v: &Vector) -> Region {
    match f {
        Formula::Atom(rel) => normalize_relation(rel, v),
        Formula::Not(child) => generalize(child, v).complement(),
        Formula::And(children) => children
            .iter()
            .map(|c| generalize(c, v))
            .reduce(|acc, r| region_intersect(acc, r, v))
            .unwrap_or_else(|| Region::positive(Trapezoid::empty())),
        Formula::Or(children) => children
            .iter()
            .map(|c| generalize(c, v).complement())
            .reduce(|acc, r| region_intersect(acc, r, v))
            .map(|r| r.complement())
            .unwrap_or_else(|| Region::negative(Trapezoid::empty())),
    }
}
