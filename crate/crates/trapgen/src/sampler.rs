//! Randomized, type-consistent sampling of restricted trapezoids and of
//! trapezoid complements.
//!
//! Values are assigned in ascending dimension order. Because every bound is
//! normalized, the bounds of each variable evaluate to concrete endpoints
//! under the partial assignment built so far; restriction guarantees those
//! endpoints always admit a value of the right type, so sampling never
//! backtracks. A [`SampleError::BacktrackViolation`] from a restricted
//! trapezoid is therefore a bug, and the test suites treat it as one.

use num_bigint::{BigInt, RandBigInt};
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::core::{Interval, Rational, RelOp, Trapezoid, VarTable, Vector};
use crate::restrictor::RestrictionResult;

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum SampleError {
    #[error("empty concrete interval for dimension {dim}: sampling would need to backtrack")]
    BacktrackViolation { dim: u32 },
    #[error("the complement of the empty trapezoid is unsatisfiable")]
    UnsatisfiableComplement,
}

/// Sampling parameters: the RNG seed, the window `W` used for unbounded and
/// half-bounded draws, and the lattice granularity `G` for rational draws
/// inside open intervals.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SamplerConfig {
    pub seed: u64,
    pub unbounded_width: u64,
    pub open_granularity: u64,
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig {
            seed,
            ..SamplerConfig::default()
        }
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            unbounded_width: 1000,
            open_granularity: 1 << 20,
        }
    }
}

/// Deterministic sampler; the stream is a pure function of the config seed
/// and the sampled inputs (ChaCha8 keystream underneath).
pub struct Sampler {
    rng: ChaCha8Rng,
    width: BigInt,
    granularity: u64,
}

impl Sampler {
    pub fn new(cfg: SamplerConfig) -> Self {
        assert!(cfg.unbounded_width >= 1, "window must be positive");
        assert!(cfg.open_granularity >= 2, "granularity must be at least 2");
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            width: BigInt::from(cfg.unbounded_width),
            granularity: cfg.open_granularity,
        }
    }

    /// Draws a vector satisfying `t`, assigning each dimension in ascending
    /// order from the concrete endpoints of its interval.
    pub fn sample_trapezoid(
        &mut self,
        t: &Trapezoid,
        vars: &VarTable,
    ) -> Result<Vector, SampleError> {
        let mut partial = Vector::empty();
        for d in vars.dims() {
            let value = match t.interval_for(d) {
                None => self.free_value(vars.is_integer(d)),
                Some(iv) => self.interval_value(iv, &partial, vars.is_integer(d))?,
            };
            partial.push(value);
        }
        Ok(partial)
    }

    /// Samples the restricted trapezoid and maps the draw back to the
    /// original basis.
    pub fn sample_original(
        &mut self,
        res: &RestrictionResult,
        vars: &VarTable,
    ) -> Result<Vector, SampleError> {
        let eta = self.sample_trapezoid(&res.trapezoid, vars)?;
        Ok(res.basis.apply_vector(&eta))
    }

    /// Draws a vector falsifying one uniformly chosen bound of `t`, which
    /// therefore satisfies the complement region of `t`.
    pub fn sample_complement(
        &mut self,
        t: &Trapezoid,
        vars: &VarTable,
    ) -> Result<Vector, SampleError> {
        let bounds: Vec<_> = t.bounds().collect();
        if bounds.is_empty() {
            return Err(SampleError::UnsatisfiableComplement);
        }
        let chosen = bounds[self.rng.gen_range(0..bounds.len())];

        let mut partial = Vector::empty();
        for d in vars.dims() {
            let value = if d == chosen.var() {
                let endpoint = chosen.poly().eval(&partial);
                self.negated_bound_value(chosen.op(), &endpoint, vars.is_integer(d))
            } else {
                self.free_value(vars.is_integer(d))
            };
            partial.push(value);
        }
        debug_assert!(!chosen.holds_at(&partial));
        Ok(partial)
    }

    /// Uniform value within the window around zero.
    fn free_value(&mut self, integer: bool) -> Rational {
        let lo = Rational::from_integer(-self.width.clone());
        let hi = Rational::from_integer(self.width.clone());
        if integer {
            self.integer_between(&lo.to_integer(), &hi.to_integer())
        } else {
            self.rational_between(&lo, &hi, true, true)
        }
    }

    fn interval_value(
        &mut self,
        iv: &Interval,
        partial: &Vector,
        integer: bool,
    ) -> Result<Rational, SampleError> {
        let dim = iv.var().index();
        match iv {
            Interval::Equality(b) => {
                let value = b.poly().eval(partial);
                if integer && !value.is_integer() {
                    return Err(SampleError::BacktrackViolation { dim });
                }
                Ok(value)
            }
            Interval::Single(b) => {
                let endpoint = b.poly().eval(partial);
                Ok(self.half_bounded_value(b.op(), &endpoint, integer))
            }
            Interval::Pair { lower, upper } => {
                let lo = lower.poly().eval(partial);
                let hi = upper.poly().eval(partial);
                if integer {
                    let lo_i = int_lower_endpoint(&lo, lower.op().is_strict());
                    let hi_i = int_upper_endpoint(&hi, upper.op().is_strict());
                    if lo_i > hi_i {
                        return Err(SampleError::BacktrackViolation { dim });
                    }
                    Ok(self.integer_between(&lo_i, &hi_i))
                } else {
                    let strict = lower.op().is_strict() || upper.op().is_strict();
                    if hi < lo || (strict && hi == lo) {
                        return Err(SampleError::BacktrackViolation { dim });
                    }
                    Ok(self.rational_between(&lo, &hi, !strict, !strict))
                }
            }
        }
    }

    /// A value satisfying a one-sided bound, within the window of the
    /// endpoint.
    fn half_bounded_value(&mut self, op: RelOp, endpoint: &Rational, integer: bool) -> Rational {
        if integer {
            match op {
                RelOp::Lt | RelOp::Leq => {
                    let hi = int_upper_endpoint(endpoint, op.is_strict());
                    self.integer_between(&(&hi - &self.width.clone()), &hi)
                }
                _ => {
                    let lo = int_lower_endpoint(endpoint, op.is_strict());
                    self.integer_between(&lo.clone(), &(&lo + &self.width))
                }
            }
        } else {
            let window = Rational::from_integer(self.width.clone());
            match op {
                RelOp::Lt => self.rational_between(&(endpoint - &window), endpoint, true, false),
                RelOp::Leq => self.rational_between(&(endpoint - &window), endpoint, true, true),
                RelOp::Gt => self.rational_between(endpoint, &(endpoint + &window), false, true),
                RelOp::Geq => self.rational_between(endpoint, &(endpoint + &window), true, true),
                RelOp::Eq => unreachable!("single intervals carry inequalities"),
            }
        }
    }

    /// A value violating `x op endpoint`, within the window.
    fn negated_bound_value(&mut self, op: RelOp, endpoint: &Rational, integer: bool) -> Rational {
        let negated = match op {
            RelOp::Lt => RelOp::Geq,
            RelOp::Leq => RelOp::Gt,
            RelOp::Gt => RelOp::Leq,
            RelOp::Geq => RelOp::Lt,
            RelOp::Eq => {
                if self.rng.gen_bool(0.5) {
                    RelOp::Lt
                } else {
                    RelOp::Gt
                }
            }
        };
        self.half_bounded_value(negated, endpoint, integer)
    }

    fn integer_between(&mut self, lo: &BigInt, hi: &BigInt) -> Rational {
        debug_assert!(lo <= hi);
        Rational::from_integer(self.rng.gen_bigint_range(lo, &(hi + BigInt::one())))
    }

    /// `lo + (hi − lo)·k/G` with `k` drawn uniformly; excluded endpoints are
    /// never hit because `k` skips 0 and `G` as requested.
    fn rational_between(
        &mut self,
        lo: &Rational,
        hi: &Rational,
        include_lo: bool,
        include_hi: bool,
    ) -> Rational {
        debug_assert!(lo <= hi);
        let g = self.granularity;
        let k_lo = if include_lo { 0 } else { 1 };
        let k_hi = if include_hi { g } else { g - 1 };
        let k = self.rng.gen_range(k_lo..=k_hi);
        lo + (hi - lo) * Rational::new(BigInt::from(k), BigInt::from(g))
    }
}

fn int_upper_endpoint(e: &Rational, strict: bool) -> BigInt {
    if strict && e.is_integer() {
        e.to_integer() - BigInt::one()
    } else {
        e.floor().to_integer()
    }
}

fn int_lower_endpoint(e: &Rational, strict: bool) -> BigInt {
    if strict && e.is_integer() {
        e.to_integer() + BigInt::one()
    } else {
        e.ceil().to_integer()
    }
}
