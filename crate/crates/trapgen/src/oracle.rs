//! Brute-force checkers: exhaustive grid verification of the generalization
//! invariants, span coverage of divisibility substitutions, and a naive
//! grid-scanning solver that stands in for an external constraint solver.

use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::{Formula, Rational, Region, VarTable, Vector};
use crate::restrictor::{ChangeOfBasis, DivisibilityConstraint};

/// Per-dimension enumeration box: integers in `[lo, hi]` at integer
/// dimensions, multiples of `1/denom` in `[lo, hi]` at rational ones.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GridSpec {
    pub lo: i64,
    pub hi: i64,
    pub denom: u64,
}

impl GridSpec {
    /// Panics unless `lo <= hi` and `denom >= 1`.
    pub fn new(lo: i64, hi: i64, denom: u64) -> Self {
        assert!(lo <= hi, "grid box must be non-empty");
        assert!(denom >= 1, "denominator must be positive");
        GridSpec { lo, hi, denom }
    }
}

fn grid_axes(spec: &GridSpec, vars: &VarTable) -> Vec<Vec<Rational>> {
    vars.entries()
        .map(|(_, _, ty)| {
            let denom = match ty {
                crate::core::VarType::Integer => 1,
                crate::core::VarType::Rational => spec.denom as i64,
            };
            (spec.lo * denom..=spec.hi * denom)
                .map(|n| Rational::new(n.into(), denom.into()))
                .collect()
        })
        .collect()
}

/// Streams the full cross product of per-dimension axis values in a
/// deterministic order (the last dimension varies fastest).
pub fn grid_points(spec: &GridSpec, vars: &VarTable) -> GridIter {
    let axes = grid_axes(spec, vars);
    GridIter {
        indices: vec![0; axes.len()],
        axes,
        done: false,
    }
}

pub struct GridIter {
    axes: Vec<Vec<Rational>>,
    indices: Vec<usize>,
    done: bool,
}

impl GridIter {
    pub fn point_count(&self) -> u64 {
        self.axes.iter().map(|a| a.len() as u64).product()
    }
}

impl Iterator for GridIter {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        if self.done {
            return None;
        }
        let point = Vector::new(
            self.axes
                .iter()
                .zip(&self.indices)
                .map(|(axis, &i)| axis[i].clone())
                .collect(),
        );
        // Odometer step, last dimension fastest.
        let mut pos = self.axes.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.indices[pos] += 1;
            if self.indices[pos] < self.axes[pos].len() {
                break;
            }
            self.indices[pos] = 0;
        }
        Some(point)
    }
}

/// Executable rendering of the generalization correctness invariants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantReport {
    /// Agreement at the reference vector: `F[v] = R[v]` (exact).
    pub inv1_ok: bool,
    /// What the formula evaluated to at the reference; selects which
    /// under-approximation direction was checked.
    pub truth_at_reference: bool,
    /// Grid points violating the selected direction, capped.
    pub inv2_violations: Vec<Vector>,
    pub points_checked: u64,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.inv1_ok && self.inv2_violations.is_empty()
    }
}

pub const DEFAULT_VIOLATION_CAP: usize = 10;

/// Checks invariant 1 exactly at `v` and the direction of invariant 2
/// selected by `F[v]` on every grid point: when `F[v]` holds, every grid
/// point in the region must satisfy the formula; otherwise every grid point
/// satisfying the formula must lie in the region.
pub fn check_invariants(
    f: &Formula,
    v: &Vector,
    r: &Region,
    spec: &GridSpec,
    vars: &VarTable,
    cap: usize,
) -> InvariantReport {
    let truth = f.eval(v);
    let inv1_ok = truth == r.eval(v);
    let mut violations = Vec::new();
    let mut points = 0u64;
    for w in grid_points(spec, vars) {
        points += 1;
        let bad = if truth {
            r.eval(&w) && !f.eval(&w)
        } else {
            f.eval(&w) && !r.eval(&w)
        };
        if bad && violations.len() < cap {
            violations.push(w);
        }
    }
    InvariantReport {
        inv1_ok,
        truth_at_reference: truth,
        inv2_violations: violations,
        points_checked: points,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpanReport {
    /// Every coefficient and the constant of `σ(E)` is divisible by `m`.
    pub symbolic_ok: bool,
    /// Grid solutions of `(m | E)` found.
    pub solutions_checked: u64,
    /// Solutions the span missed (inversion failed), capped.
    pub missed: Vec<Vector>,
}

impl SpanReport {
    pub fn passed(&self) -> bool {
        self.symbolic_ok && self.missed.is_empty()
    }
}

/// Verifies the two substitution guarantees for `cob = tcob(dc)`: symbolic
/// divisibility of the rewritten expression, and span coverage — every grid
/// solution of the constraint inverts through the substitution with integer
/// values everywhere.
///
/// Divisibility filtering runs in machine integers (the expression is
/// integral and the box is small); only actual solutions exercise the exact
/// inversion path, keeping the check independent of it.
pub fn check_divisibility_span(
    dc: &DivisibilityConstraint,
    cob: &ChangeOfBasis,
    spec: &GridSpec,
) -> SpanReport {
    let symbolic_ok = crate::restrictor::poly_divisible_by(&cob.apply_poly(dc.expr()), dc.modulus());

    let dims = dc.expr().dim();
    let vars = VarTable::with_integer_dims(dims);
    let (terms, constant) = dc
        .expr()
        .integer_terms()
        .expect("divisibility expressions are integral");
    let modulus = dc
        .modulus()
        .to_i128()
        .expect("grid moduli fit machine integers");

    let mut solutions = 0u64;
    let mut missed = Vec::new();
    let mut point = vec![spec.lo; dims as usize];
    loop {
        let mut value = constant;
        for &(d, c) in &terms {
            value += c * point[(d - 1) as usize] as i128;
        }
        if value.rem_euclid(modulus) == 0 {
            solutions += 1;
            let w = Vector::from_i64s(&point);
            match cob.invert_apply(&w, &vars) {
                Ok(eta) => debug_assert_eq!(cob.apply_vector(&eta), w),
                Err(_) => {
                    if missed.len() < DEFAULT_VIOLATION_CAP {
                        missed.push(w);
                    }
                }
            }
        }
        // Odometer.
        let mut pos = point.len();
        loop {
            if pos == 0 {
                return SpanReport {
                    symbolic_ok,
                    solutions_checked: solutions,
                    missed,
                };
            }
            pos -= 1;
            point[pos] += 1;
            if point[pos] <= spec.hi {
                break;
            }
            point[pos] = spec.lo;
        }
    }
}

/// Random grid probes followed by a deterministic scan; returns the first
/// vector satisfying `f`, if any point of the grid does.
pub fn naive_solve(
    f: &Formula,
    vars: &VarTable,
    spec: &GridSpec,
    budget: u64,
    seed: u64,
) -> Option<Vector> {
    let axes = grid_axes(spec, vars);
    if axes.iter().any(|a| a.is_empty()) {
        return None;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let w = Vector::new(
            axes.iter()
                .map(|axis| axis[rng.gen_range(0..axis.len())].clone())
                .collect(),
        );
        if f.eval(&w) {
            return Some(w);
        }
    }
    grid_points(spec, vars).find(|w| f.eval(w))
}
