use std::fmt;

use super::poly::{EvalError, Poly, Rational};
use super::vector::Vector;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RelOp {
    Eq,
    Lt,
    Leq,
    Gt,
    Geq,
}

impl RelOp {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            RelOp::Eq => lhs == rhs,
            RelOp::Lt => lhs < rhs,
            RelOp::Leq => lhs <= rhs,
            RelOp::Gt => lhs > rhs,
            RelOp::Geq => lhs >= rhs,
        }
    }

    /// The relation seen from the other side: `a op b` iff `b swapped(op) a`.
    pub fn swapped(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Eq,
            RelOp::Lt => RelOp::Gt,
            RelOp::Leq => RelOp::Geq,
            RelOp::Gt => RelOp::Lt,
            RelOp::Geq => RelOp::Leq,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, RelOp::Lt | RelOp::Gt)
    }

    /// Upper-bound sense when used as `x op P`.
    pub fn is_upper(self) -> bool {
        matches!(self, RelOp::Lt | RelOp::Leq)
    }

    /// Lower-bound sense when used as `x op P`.
    pub fn is_lower(self) -> bool {
        matches!(self, RelOp::Gt | RelOp::Geq)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Lt => "<",
            RelOp::Leq => "<=",
            RelOp::Gt => ">",
            RelOp::Geq => ">=",
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An equality or inequality between two polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearRelation {
    pub lhs: Poly,
    pub op: RelOp,
    pub rhs: Poly,
}

impl LinearRelation {
    pub fn new(lhs: Poly, op: RelOp, rhs: Poly) -> Self {
        LinearRelation { lhs, op, rhs }
    }

    pub fn dim(&self) -> u32 {
        self.lhs.dim().max(self.rhs.dim())
    }

    /// Panics if `v` misses a dimension; see [`LinearRelation::checked_eval`].
    pub fn eval(&self, v: &Vector) -> bool {
        self.op.holds(&self.lhs.eval(v), &self.rhs.eval(v))
    }

    pub fn checked_eval(&self, v: &Vector) -> Result<bool, EvalError> {
        Ok(self
            .op
            .holds(&self.lhs.checked_eval(v)?, &self.rhs.checked_eval(v)?))
    }
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

/// Boolean combination of linear constraints. `And`/`Or` carry at least one
/// child in parsed input; evaluation treats the empty conjunction as true
/// and the empty disjunction as false.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Atom(LinearRelation),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn atom(lhs: Poly, op: RelOp, rhs: Poly) -> Self {
        Formula::Atom(LinearRelation::new(lhs, op, rhs))
    }

    pub fn negate(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn dim(&self) -> u32 {
        match self {
            Formula::Atom(rel) => rel.dim(),
            Formula::And(children) | Formula::Or(children) => {
                children.iter().map(Formula::dim).max().unwrap_or(0)
            }
            Formula::Not(child) => child.dim(),
        }
    }

    /// Panics if `v` misses a dimension; see [`Formula::checked_eval`].
    pub fn eval(&self, v: &Vector) -> bool {
        match self {
            Formula::Atom(rel) => rel.eval(v),
            Formula::And(children) => children.iter().all(|c| c.eval(v)),
            Formula::Or(children) => children.iter().any(|c| c.eval(v)),
            Formula::Not(child) => !child.eval(v),
        }
    }

    pub fn checked_eval(&self, v: &Vector) -> Result<bool, EvalError> {
        match self {
            Formula::Atom(rel) => rel.checked_eval(v),
            Formula::And(children) => {
                let mut acc = true;
                for c in children {
                    acc &= c.checked_eval(v)?;
                }
                Ok(acc)
            }
            Formula::Or(children) => {
                let mut acc = false;
                for c in children {
                    acc |= c.checked_eval(v)?;
                }
                Ok(acc)
            }
            Formula::Not(child) => Ok(!child.checked_eval(v)?),
        }
    }

    /// All atoms of the formula, left to right.
    pub fn atoms(&self) -> Vec<&LinearRelation> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a LinearRelation>) {
        match self {
            Formula::Atom(rel) => out.push(rel),
            Formula::And(children) | Formula::Or(children) => {
                children.iter().for_each(|c| c.collect_atoms(out));
            }
            Formula::Not(child) => child.collect_atoms(out),
        }
    }
}
