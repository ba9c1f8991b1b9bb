use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::vars::Dim;
use super::vector::Vector;

/// Exact arbitrary-precision rational; stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for small rational literals. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum EvalError {
    #[error("vector assigns {assigned} dimensions but dimension {required} is required")]
    MissingDimension { required: u32, assigned: u32 },
}

/// Linear multivariate polynomial `c_n·x_n + … + c_1·x_1 + c_0` with exact
/// rational coefficients. Zero coefficients are never stored, so the largest
/// stored dimension is the dimension of the polynomial (0 for constants).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    coeffs: BTreeMap<Dim, Rational>,
    constant: Rational,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn from_constant(c: Rational) -> Self {
        Poly {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(d: Dim) -> Self {
        Poly::term(Rational::one(), d)
    }

    /// The single-term polynomial `c·x_d`.
    pub fn term(c: Rational, d: Dim) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(d, c);
        }
        Poly {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn with_terms<I>(constant: Rational, terms: I) -> Self
    where
        I: IntoIterator<Item = (Dim, Rational)>,
    {
        let mut p = Poly::from_constant(constant);
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    fn add_term(&mut self, d: Dim, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&d) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.coeffs.remove(&d);
                }
            }
            None => {
                self.coeffs.insert(d, c);
            }
        }
    }

    /// Dimension of the polynomial; constants have dimension 0.
    pub fn dim(&self) -> u32 {
        self.coeffs.keys().next_back().map_or(0, |d| d.index())
    }

    pub fn leading(&self) -> Option<(Dim, &Rational)> {
        self.coeffs.iter().next_back().map(|(d, c)| (*d, c))
    }

    /// Splits off the leading term: `(var, coeff, rest)` with
    /// `self = coeff·var + rest` and `dim(rest) < var`.
    pub fn split_leading(&self) -> Option<(Dim, Rational, Poly)> {
        let mut rest = self.clone();
        rest.coeffs.pop_last().map(|(d, c)| (d, c, rest))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, d: Dim) -> Rational {
        self.coeffs.get(&d).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms in ascending dimension order.
    pub fn terms(&self) -> impl Iterator<Item = (Dim, &Rational)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// Exact evaluation at `v`. Panics if `v` does not assign every
    /// dimension of the polynomial; use [`Poly::checked_eval`] at input
    /// boundaries.
    pub fn eval(&self, v: &Vector) -> Rational {
        let mut acc = self.constant.clone();
        for (d, c) in &self.coeffs {
            acc += c * v.value(*d);
        }
        acc
    }

    pub fn checked_eval(&self, v: &Vector) -> Result<Rational, EvalError> {
        if self.dim() > v.dim_count() {
            return Err(EvalError::MissingDimension {
                required: self.dim(),
                assigned: v.dim_count(),
            });
        }
        Ok(self.eval(v))
    }

    /// Least common denominator of all coefficients and the constant term;
    /// always positive, and `lcd(P)·P` has integer coefficients throughout.
    pub fn lcd(&self) -> BigInt {
        let mut acc = self.constant.denom().clone();
        for c in self.coeffs.values() {
            acc = acc.lcm(c.denom());
        }
        acc
    }

    /// `a·p + b·q` with zero coefficients dropped.
    pub fn combine(a: &Rational, p: &Poly, b: &Rational, q: &Poly) -> Poly {
        let mut out = p.scale(a);
        out.constant += b * &q.constant;
        for (d, c) in &q.coeffs {
            out.add_term(*d, b * c);
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        Poly::combine(&Rational::one(), self, &Rational::one(), other)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        Poly::combine(&Rational::one(), self, &-Rational::one(), other)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub fn add_constant(&self, k: &Rational) -> Poly {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    /// True when every coefficient and the constant term is an integer.
    pub fn is_integral(&self) -> bool {
        self.constant.is_integer() && self.coeffs.values().all(|c| c.is_integer())
    }

    /// Integer view `(terms, constant)` used by brute-force checkers; `None`
    /// unless the polynomial is integral.
    pub fn integer_terms(&self) -> Option<(Vec<(u32, i128)>, i128)> {
        use num_traits::ToPrimitive;
        if !self.is_integral() {
            return None;
        }
        let constant = self.constant.to_integer().to_i128()?;
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (d, c) in &self.coeffs {
            terms.push((d.index(), c.to_integer().to_i128()?));
        }
        Some((terms, constant))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{d}")?;
            } else {
                write!(f, "{mag}·{d}")?;
            }
            first = false;
        }
        if !self.constant.is_zero() || first {
            if first {
                write!(f, "{}", self.constant)?;
            } else if self.constant.is_negative() {
                write!(f, " - {}", self.constant.abs())?;
            } else {
                write!(f, " + {}", self.constant)?;
            }
        }
        Ok(())
    }
}
