use std::fmt;

use super::formula::RelOp;
use super::poly::Poly;
use super::vars::Dim;
use super::vector::Vector;

/// Normalized variable bound `x_var op poly` where every variable of `poly`
/// has a dimension strictly below `var`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bound {
    var: Dim,
    op: RelOp,
    poly: Poly,
}

impl Bound {
    /// Panics unless the bound is normalized.
    pub fn new(var: Dim, op: RelOp, poly: Poly) -> Self {
        assert!(
            poly.dim() < var.index(),
            "bound on {var} must have a lower-dimension bounding polynomial, got dim {}",
            poly.dim()
        );
        Bound { var, op, poly }
    }

    pub fn var(&self) -> Dim {
        self.var
    }

    pub fn op(&self) -> RelOp {
        self.op
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn dim(&self) -> u32 {
        self.var.index()
    }

    pub fn holds_at(&self, v: &Vector) -> bool {
        self.op.holds(v.value(self.var), &self.poly.eval(v))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.var, self.op, self.poly)
    }
}

/// All bounds of one variable: a single one-sided bound, a lower/upper pair,
/// or an equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Interval {
    Single(Bound),
    Pair { lower: Bound, upper: Bound },
    Equality(Bound),
}

impl Interval {
    pub fn single(bound: Bound) -> Self {
        assert!(
            bound.op().is_upper() || bound.op().is_lower(),
            "single intervals carry inequality bounds"
        );
        Interval::Single(bound)
    }

    pub fn pair(lower: Bound, upper: Bound) -> Self {
        assert_eq!(lower.var(), upper.var(), "pair bounds must share a variable");
        assert!(lower.op().is_lower(), "lower bound must be > or >=");
        assert!(upper.op().is_upper(), "upper bound must be < or <=");
        Interval::Pair { lower, upper }
    }

    pub fn equality(bound: Bound) -> Self {
        assert_eq!(bound.op(), RelOp::Eq, "equality intervals carry =");
        Interval::Equality(bound)
    }

    pub fn var(&self) -> Dim {
        match self {
            Interval::Single(b) | Interval::Equality(b) => b.var(),
            Interval::Pair { lower, .. } => lower.var(),
        }
    }

    pub fn bounds(&self) -> impl Iterator<Item = &Bound> {
        let (a, b) = match self {
            Interval::Single(b) | Interval::Equality(b) => (b, None),
            Interval::Pair { lower, upper } => (lower, Some(upper)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn holds_at(&self, v: &Vector) -> bool {
        self.bounds().all(|b| b.holds_at(v))
    }
}

/// Conjunction of normalized variable bounds with at most one interval per
/// variable, stored in strictly descending dimension order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Trapezoid {
    intervals: Vec<Interval>,
}

impl Trapezoid {
    pub fn empty() -> Self {
        Trapezoid::default()
    }

    /// Panics unless `intervals` is strictly descending by dimension.
    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        for pair in intervals.windows(2) {
            assert!(
                pair[0].var() > pair[1].var(),
                "trapezoid intervals must be strictly descending by dimension"
            );
        }
        Trapezoid { intervals }
    }

    pub fn single_bound(bound: Bound) -> Self {
        let interval = match bound.op() {
            RelOp::Eq => Interval::equality(bound),
            _ => Interval::single(bound),
        };
        Trapezoid {
            intervals: vec![interval],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn into_intervals(self) -> Vec<Interval> {
        self.intervals
    }

    pub fn interval_for(&self, d: Dim) -> Option<&Interval> {
        self.intervals.iter().find(|iv| iv.var() == d)
    }

    pub fn bounds(&self) -> impl Iterator<Item = &Bound> {
        self.intervals.iter().flat_map(Interval::bounds)
    }

    pub fn bound_count(&self) -> usize {
        self.bounds().count()
    }

    /// Dimension of the highest bound variable, 0 when empty.
    pub fn dim(&self) -> u32 {
        self.intervals.first().map_or(0, |iv| iv.var().index())
    }

    /// The logical interpretation: the conjunction of all bounds.
    pub fn eval(&self, v: &Vector) -> bool {
        self.bounds().all(|b| b.holds_at(v))
    }
}

impl fmt::Display for Trapezoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for b in self.bounds() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Positive,
    Negative,
}

/// A trapezoid or its logical complement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Region {
    sign: Sign,
    body: Trapezoid,
}

impl Region {
    pub fn positive(body: Trapezoid) -> Self {
        Region {
            sign: Sign::Positive,
            body,
        }
    }

    pub fn negative(body: Trapezoid) -> Self {
        Region {
            sign: Sign::Negative,
            body,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Positive
    }

    pub fn body(&self) -> &Trapezoid {
        &self.body
    }

    pub fn into_body(self) -> Trapezoid {
        self.body
    }

    /// Flips the sign; involutive.
    pub fn complement(&self) -> Region {
        Region {
            sign: match self.sign {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
            },
            body: self.body.clone(),
        }
    }

    pub fn eval(&self, v: &Vector) -> bool {
        match self.sign {
            Sign::Positive => self.body.eval(v),
            Sign::Negative => !self.body.eval(v),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Positive => write!(f, "{}", self.body),
            Sign::Negative => write!(f, "~{}", self.body),
        }
    }
}
