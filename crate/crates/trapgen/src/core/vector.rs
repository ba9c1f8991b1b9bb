use super::poly::Rational;
use super::vars::{Dim, VarTable};

/// Total assignment of rational values to dimensions `1..=n`, in order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Vector {
    values: Vec<Rational>,
}

impl Vector {
    pub fn new(values: Vec<Rational>) -> Self {
        Vector { values }
    }

    pub fn empty() -> Self {
        Vector::default()
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        Vector {
            values: values
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        }
    }

    pub fn dim_count(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, d: Dim) -> Option<&Rational> {
        self.values.get((d.index() - 1) as usize)
    }

    /// Panics if `d` is unassigned; use [`Vector::get`] at input boundaries.
    pub fn value(&self, d: Dim) -> &Rational {
        &self.values[(d.index() - 1) as usize]
    }

    /// Appends the value for the next dimension.
    pub fn push(&mut self, value: Rational) {
        self.values.push(value);
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// A consistent vector carries an integer value at every integer
    /// dimension.
    pub fn is_consistent(&self, vars: &VarTable) -> bool {
        vars.entries().all(|(d, _, _)| match self.get(d) {
            Some(v) => !vars.is_integer(d) || v.is_integer(),
            None => false,
        })
    }
}
