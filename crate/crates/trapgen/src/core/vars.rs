use std::fmt;

use thiserror::Error;

/// 1-based variable index. Constants live at dimension 0, strictly below
/// every variable, so a `Dim` is always at least 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Dim(u32);

impl Dim {
    /// Panics if `index` is zero.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "dimensions are 1-based");
        Dim(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum VarType {
    Integer,
    Rational,
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum VarTableError {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error(
        "integer variable `{integer}` declared after rational variable `{rational}`; \
         declare all integer variables before any rational variable"
    )]
    IntegerAfterRational { integer: String, rational: String },
}

/// Ordered variable declarations; the position of a variable (1-based) is its
/// dimension. Integer variables must precede rational ones so that the
/// bounding polynomial of an integer variable can only mention integer
/// variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarTable {
    vars: Vec<(String, VarType)>,
}

impl VarTable {
    pub fn new<I, S>(decls: I) -> Result<Self, VarTableError>
    where
        I: IntoIterator<Item = (S, VarType)>,
        S: Into<String>,
    {
        let mut vars: Vec<(String, VarType)> = Vec::new();
        let mut last_rational: Option<String> = None;
        for (name, ty) in decls {
            let name = name.into();
            if vars.iter().any(|(n, _)| *n == name) {
                return Err(VarTableError::DuplicateName(name));
            }
            match ty {
                VarType::Rational => last_rational = Some(name.clone()),
                VarType::Integer => {
                    if let Some(rational) = &last_rational {
                        return Err(VarTableError::IntegerAfterRational {
                            integer: name,
                            rational: rational.clone(),
                        });
                    }
                }
            }
            vars.push((name, ty));
        }
        Ok(VarTable { vars })
    }

    /// A table of `n` integer variables named `x1`..`xn`.
    pub fn with_integer_dims(n: u32) -> Self {
        VarTable::new((1..=n).map(|i| (format!("x{i}"), VarType::Integer)))
            .expect("synthetic names are unique and all-integer")
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn dim_count(&self) -> u32 {
        self.vars.len() as u32
    }

    pub fn dims(&self) -> impl Iterator<Item = Dim> + '_ {
        (1..=self.dim_count()).map(Dim::new)
    }

    pub fn dim_of(&self, name: &str) -> Option<Dim> {
        self.vars
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| Dim::new(i as u32 + 1))
    }

    /// Panics if `d` is not declared.
    pub fn name(&self, d: Dim) -> &str {
        &self.vars[(d.index() - 1) as usize].0
    }

    /// Panics if `d` is not declared.
    pub fn var_type(&self, d: Dim) -> VarType {
        self.vars[(d.index() - 1) as usize].1
    }

    pub fn is_integer(&self, d: Dim) -> bool {
        self.var_type(d) == VarType::Integer
    }

    pub fn entries(&self) -> impl Iterator<Item = (Dim, &str, VarType)> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, (n, t))| (Dim::new(i as u32 + 1), n.as_str(), *t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declaration_order_assigns_dimensions() {
        let t = VarTable::new([("x", VarType::Integer), ("q", VarType::Rational)]).unwrap();
        assert_eq!(t.dim_of("x"), Some(Dim::new(1)));
        assert_eq!(t.dim_of("q"), Some(Dim::new(2)));
        assert_eq!(t.dim_of("missing"), None);
        assert_eq!(t.name(Dim::new(2)), "q");
        assert!(t.is_integer(Dim::new(1)));
        assert!(!t.is_integer(Dim::new(2)));
    }

    #[test]
    fn rejects_integer_after_rational() {
        let err = VarTable::new([("q", VarType::Rational), ("x", VarType::Integer)]).unwrap_err();
        assert!(matches!(err, VarTableError::IntegerAfterRational { .. }));
    }

    #[test]
    fn rejects_duplicate_names() {
        let err = VarTable::new([("x", VarType::Integer), ("x", VarType::Integer)]).unwrap_err();
        assert_eq!(err, VarTableError::DuplicateName("x".into()));
    }
}
