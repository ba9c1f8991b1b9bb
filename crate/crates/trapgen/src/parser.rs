//! S-expression text format for problems (variable declarations, a formula,
//! and an optional reference vector), and renderers/parsers for regions and
//! vectors.
//!
//! Problem grammar (UTF-8 text, one `vars`, one `assert`, at most one
//! `reference`):
//!
//! ```text
//! problem   := decl*
//! decl      := "(vars" var+ ")" | "(assert" formula ")" | "(reference" binding+ ")"
//! var       := "(" name ("int"|"rat") ")"
//! formula   := "(and" formula+ ")" | "(or" formula+ ")" | "(not" formula ")" | atom
//! atom      := "(" ("="|"<"|"<="|">"|">=") poly poly ")"
//! poly      := rationalLit | name | "(+" poly+ ")" | "(-" poly poly ")" | "(* " rationalLit name ")"
//! binding   := "(" name rationalLit ")"
//! ```
//!
//! Rational literals are `p`, `-p`, or `p/q` — decimals are rejected so
//! every parsed value is exact. Dimensions are assigned by declaration
//! order, 1-based.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::core::{
    Bound, Dim, Formula, Interval, LinearRelation, Poly, Rational, RelOp, Region, Sign, Trapezoid,
    VarTable, VarTableError, VarType, Vector,
};

#[derive(Error, Clone, PartialEq, Eq, Debug)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn new(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A parsed problem: declared variables, the asserted formula, and an
/// optional reference vector (total and type-consistent when present).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Problem {
    pub vars: VarTable,
    pub formula: Formula,
    pub reference: Option<Vector>,
}

// ---------------------------------------------------------------------------
// S-expression reader

#[derive(Clone, Debug)]
enum SExpr {
    Atom { text: String, line: u32, col: u32 },
    List { items: Vec<SExpr>, line: u32, col: u32 },
}

impl SExpr {
    fn pos(&self) -> (u32, u32) {
        match self {
            SExpr::Atom { line, col, .. } | SExpr::List { line, col, .. } => (*line, *col),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.pos();
        ParseError::new(line, col, message)
    }

    fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }
}

fn read_sexprs(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Vec<SExpr>, u32, u32)> = Vec::new();
    let mut top: Vec<SExpr> = Vec::new();
    let mut atom: Option<(String, u32, u32)> = None;
    let mut line = 1u32;
    let mut col = 0u32;

    let push = |stack: &mut Vec<(Vec<SExpr>, u32, u32)>, top: &mut Vec<SExpr>, e: SExpr| {
        match stack.last_mut() {
            Some((items, _, _)) => items.push(e),
            None => top.push(e),
        }
    };

    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
            col = 0;
        } else {
            col += 1;
        }
        let boundary = ch.is_whitespace() || ch == '(' || ch == ')';
        if boundary {
            if let Some((text, l, c)) = atom.take() {
                push(&mut stack, &mut top, SExpr::Atom { text, line: l, col: c });
            }
        }
        match ch {
            '(' => stack.push((Vec::new(), line, col)),
            ')' => match stack.pop() {
                Some((items, l, c)) => {
                    push(&mut stack, &mut top, SExpr::List { items, line: l, col: c })
                }
                None => return Err(ParseError::new(line, col, "unmatched `)`")),
            },
            c if c.is_whitespace() => {}
            c => match &mut atom {
                Some((text, _, _)) => text.push(c),
                None => atom = Some((c.to_string(), line, col)),
            },
        }
    }
    if let Some((text, l, c)) = atom.take() {
        push(&mut stack, &mut top, SExpr::Atom { text, line: l, col: c });
    }
    if let Some((_, l, c)) = stack.last() {
        return Err(ParseError::new(*l, *c, "unclosed `(`"));
    }
    Ok(top)
}

// ---------------------------------------------------------------------------
// Literals

fn is_rational_literal(text: &str) -> bool {
    parse_rational_text(text).is_some()
}

fn parse_rational_text(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = num.parse().ok()?;
    let denom: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            d.parse().ok()?
        }
    };
    if denom == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(numer, denom))
}

fn parse_rational(e: &SExpr) -> Result<Rational, ParseError> {
    let text = e
        .as_atom()
        .ok_or_else(|| e.error("expected a rational literal"))?;
    parse_rational_text(text).ok_or_else(|| {
        e.error(format!(
            "expected a rational literal `p`, `-p`, or `p/q`, got `{text}`"
        ))
    })
}

fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Problem parsing

fn parse_var_name(e: &SExpr, vars: &VarTable) -> Result<Dim, ParseError> {
    let name = e.as_atom().ok_or_else(|| e.error("expected a variable name"))?;
    vars.dim_of(name)
        .ok_or_else(|| e.error(format!("undeclared variable `{name}`")))
}

fn parse_poly(e: &SExpr, vars: &VarTable) -> Result<Poly, ParseError> {
    match e {
        SExpr::Atom { text, .. } => {
            if let Some(r) = parse_rational_text(text) {
                return Ok(Poly::from_constant(r));
            }
            Ok(Poly::var(parse_var_name(e, vars)?))
        }
        SExpr::List { items, .. } => {
            let head = items
                .first()
                .and_then(SExpr::as_atom)
                .ok_or_else(|| e.error("expected `+`, `-`, or `*`"))?;
            let args = &items[1..];
            match head {
                "+" => {
                    if args.is_empty() {
                        return Err(e.error("`+` needs at least one argument"));
                    }
                    let mut acc = Poly::zero();
                    for a in args {
                        acc = acc.add(&parse_poly(a, vars)?);
                    }
                    Ok(acc)
                }
                "-" => {
                    if args.len() != 2 {
                        return Err(e.error("`-` takes exactly two arguments"));
                    }
                    Ok(parse_poly(&args[0], vars)?.sub(&parse_poly(&args[1], vars)?))
                }
                "*" => {
                    if args.len() != 2 {
                        return Err(e.error("`*` takes a rational literal and a variable"));
                    }
                    let coeff = parse_rational(&args[0])?;
                    let var = parse_var_name(&args[1], vars)?;
                    Ok(Poly::term(coeff, var))
                }
                other => Err(e.error(format!("unknown polynomial operator `{other}`"))),
            }
        }
    }
}

fn rel_op(text: &str) -> Option<RelOp> {
    match text {
        "=" => Some(RelOp::Eq),
        "<" => Some(RelOp::Lt),
        "<=" => Some(RelOp::Leq),
        ">" => Some(RelOp::Gt),
        ">=" => Some(RelOp::Geq),
        _ => None,
    }
}

fn parse_formula(e: &SExpr, vars: &VarTable) -> Result<Formula, ParseError> {
    let items = match e {
        SExpr::List { items, .. } => items,
        SExpr::Atom { .. } => return Err(e.error("expected a formula")),
    };
    let head = items
        .first()
        .and_then(SExpr::as_atom)
        .ok_or_else(|| e.error("expected `and`, `or`, `not`, or a relation"))?;
    let args = &items[1..];
    match head {
        "and" | "or" => {
            if args.is_empty() {
                return Err(e.error(format!("`{head}` needs at least one argument")));
            }
            let children = args
                .iter()
                .map(|a| parse_formula(a, vars))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" {
                Formula::And(children)
            } else {
                Formula::Or(children)
            })
        }
        "not" => {
            if args.len() != 1 {
                return Err(e.error("`not` takes exactly one argument"));
            }
            Ok(parse_formula(&args[0], vars)?.negate())
        }
        op_text => {
            let op = rel_op(op_text)
                .ok_or_else(|| e.error(format!("unknown formula operator `{op_text}`")))?;
            if args.len() != 2 {
                return Err(e.error(format!("`{op_text}` takes exactly two polynomials")));
            }
            Ok(Formula::Atom(LinearRelation::new(
                parse_poly(&args[0], vars)?,
                op,
                parse_poly(&args[1], vars)?,
            )))
        }
    }
}

/// Parses a problem file; see the module docs for the grammar.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let forms = read_sexprs(text)?;
    let mut vars_form: Option<&SExpr> = None;
    let mut assert_form: Option<&SExpr> = None;
    let mut reference_form: Option<&SExpr> = None;

    for form in &forms {
        let items = match form {
            SExpr::List { items, .. } => items,
            SExpr::Atom { .. } => return Err(form.error("expected `(vars …)`, `(assert …)`, or `(reference …)`")),
        };
        let head = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| form.error("expected `vars`, `assert`, or `reference`"))?;
        let slot = match head {
            "vars" => &mut vars_form,
            "assert" => &mut assert_form,
            "reference" => &mut reference_form,
            other => return Err(form.error(format!("unknown declaration `{other}`"))),
        };
        if slot.is_some() {
            return Err(form.error(format!("duplicate `{head}` declaration")));
        }
        *slot = Some(form);
    }

    // Variables.
    let vars_form = vars_form
        .ok_or_else(|| ParseError::new(1, 1, "missing `(vars …)` declaration"))?;
    let var_items = match vars_form {
        SExpr::List { items, .. } => &items[1..],
        SExpr::Atom { .. } => unreachable!(),
    };
    if var_items.is_empty() {
        return Err(vars_form.error("`vars` needs at least one declaration"));
    }
    let mut decls: Vec<(String, VarType)> = Vec::new();
    for item in var_items {
        let (name_e, ty_e) = match item {
            SExpr::List { items, .. } if items.len() == 2 => (&items[0], &items[1]),
            _ => return Err(item.error("expected `(name int|rat)`")),
        };
        let name = name_e
            .as_atom()
            .filter(|n| !is_rational_literal(n))
            .ok_or_else(|| name_e.error("expected a variable name"))?;
        let ty = match ty_e.as_atom() {
            Some("int") => VarType::Integer,
            Some("rat") => VarType::Rational,
            _ => return Err(ty_e.error("expected `int` or `rat`")),
        };
        decls.push((name.to_string(), ty));
    }
    let vars = VarTable::new(decls).map_err(|err| match &err {
        VarTableError::DuplicateName(_) | VarTableError::IntegerAfterRational { .. } => {
            vars_form.error(err.to_string())
        }
    })?;

    // Formula.
    let assert_form =
        assert_form.ok_or_else(|| ParseError::new(1, 1, "missing `(assert …)` declaration"))?;
    let assert_items = match assert_form {
        SExpr::List { items, .. } => &items[1..],
        SExpr::Atom { .. } => unreachable!(),
    };
    if assert_items.len() != 1 {
        return Err(assert_form.error("`assert` takes exactly one formula"));
    }
    let formula = parse_formula(&assert_items[0], &vars)?;

    // Optional reference vector.
    let reference = match reference_form {
        None => None,
        Some(form) => {
            let items = match form {
                SExpr::List { items, .. } => &items[1..],
                SExpr::Atom { .. } => unreachable!(),
            };
            let mut values: Vec<Option<Rational>> = vec![None; vars.len()];
            for item in items {
                let (name_e, value_e) = match item {
                    SExpr::List { items, .. } if items.len() == 2 => (&items[0], &items[1]),
                    _ => return Err(item.error("expected `(name value)`")),
                };
                let dim = parse_var_name(name_e, &vars)?;
                let value = parse_rational(value_e)?;
                if vars.is_integer(dim) && !value.is_integer() {
                    return Err(value_e.error(format!(
                        "rational literal `{}` bound to integer variable `{}`",
                        render_rational(&value),
                        vars.name(dim)
                    )));
                }
                let slot = &mut values[(dim.index() - 1) as usize];
                if slot.is_some() {
                    return Err(item.error(format!("duplicate binding for `{}`", vars.name(dim))));
                }
                *slot = Some(value);
            }
            let mut vector = Vector::empty();
            for (i, value) in values.into_iter().enumerate() {
                match value {
                    Some(v) => vector.push(v),
                    None => {
                        return Err(form.error(format!(
                            "reference is missing a binding for `{}`",
                            vars.name(Dim::new(i as u32 + 1))
                        )))
                    }
                }
            }
            Some(vector)
        }
    };

    Ok(Problem {
        vars,
        formula,
        reference,
    })
}

// ---------------------------------------------------------------------------
// Rendering

fn render_poly(p: &Poly, vars: &VarTable) -> String {
    let mut parts: Vec<String> = Vec::new();
    let terms: Vec<_> = p.terms().collect();
    for (d, c) in terms.into_iter().rev() {
        let name = vars.name(d);
        if c.is_one() {
            parts.push(name.to_string());
        } else {
            parts.push(format!("(* {} {})", render_rational(c), name));
        }
    }
    if !p.constant_term().is_zero() || parts.is_empty() {
        parts.push(render_rational(p.constant_term()));
    }
    match parts.len() {
        1 => parts.pop().unwrap(),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

fn render_bound(b: &Bound, vars: &VarTable) -> String {
    format!(
        "({} {} {})",
        b.op().symbol(),
        vars.name(b.var()),
        render_poly(b.poly(), vars)
    )
}

/// Deterministic rendering: intervals in descending dimension order, a
/// pair's lower bound before its upper, coefficients as `p/q`. Round-trips
/// through [`parse_region`].
pub fn render_region(r: &Region, vars: &VarTable) -> String {
    let sign = match r.sign() {
        Sign::Positive => "+",
        Sign::Negative => "-",
    };
    let bounds: Vec<String> = r
        .body()
        .intervals()
        .iter()
        .flat_map(|iv| -> Vec<String> {
            match iv {
                Interval::Single(b) | Interval::Equality(b) => vec![render_bound(b, vars)],
                Interval::Pair { lower, upper } => {
                    vec![render_bound(lower, vars), render_bound(upper, vars)]
                }
            }
        })
        .collect();
    format!("(region {sign} ({}))", bounds.join(" "))
}

/// Parses the output of [`render_region`] back into a region.
pub fn parse_region(text: &str, vars: &VarTable) -> Result<Region, ParseError> {
    let forms = read_sexprs(text)?;
    if forms.len() != 1 {
        return Err(ParseError::new(1, 1, "expected a single `(region …)` form"));
    }
    let items = match &forms[0] {
        SExpr::List { items, .. } => items,
        atom => return Err(atom.error("expected `(region …)`")),
    };
    if items.len() != 3 || items[0].as_atom() != Some("region") {
        return Err(forms[0].error("expected `(region SIGN (BOUND…))`"));
    }
    let sign = match items[1].as_atom() {
        Some("+") => Sign::Positive,
        Some("-") => Sign::Negative,
        _ => return Err(items[1].error("expected `+` or `-`")),
    };
    let bound_forms = match &items[2] {
        SExpr::List { items, .. } => items,
        atom => return Err(atom.error("expected a list of bounds")),
    };

    // Group parsed bounds per variable, then assemble intervals descending.
    let mut per_var: std::collections::BTreeMap<Dim, Vec<Bound>> = std::collections::BTreeMap::new();
    for bf in bound_forms {
        let parts = match bf {
            SExpr::List { items, .. } if items.len() == 3 => items,
            _ => return Err(bf.error("expected `(op var poly)`")),
        };
        let op = parts[0]
            .as_atom()
            .and_then(rel_op)
            .ok_or_else(|| parts[0].error("expected a relational operator"))?;
        let var = parse_var_name(&parts[1], vars)?;
        let poly = parse_poly(&parts[2], vars)?;
        if poly.dim() >= var.index() {
            return Err(parts[2].error(format!(
                "bound on `{}` mentions a variable of equal or higher dimension",
                vars.name(var)
            )));
        }
        per_var.entry(var).or_default().push(Bound::new(var, op, poly));
    }

    let mut intervals = Vec::new();
    for (var, bounds) in per_var.into_iter().rev() {
        let mut eq = None;
        let mut lower = None;
        let mut upper = None;
        for b in bounds {
            let slot = match b.op() {
                RelOp::Eq => &mut eq,
                op if op.is_upper() => &mut upper,
                _ => &mut lower,
            };
            if slot.is_some() {
                return Err(ParseError::new(
                    1,
                    1,
                    format!("multiple bounds of one kind on `{}`", vars.name(var)),
                ));
            }
            *slot = Some(b);
        }
        let interval = match (eq, lower, upper) {
            (Some(b), None, None) => Interval::equality(b),
            (None, Some(lower), Some(upper)) => Interval::pair(lower, upper),
            (None, Some(b), None) | (None, None, Some(b)) => Interval::single(b),
            _ => {
                return Err(ParseError::new(
                    1,
                    1,
                    format!("conflicting bounds on `{}`", vars.name(var)),
                ))
            }
        };
        intervals.push(interval);
    }
    Ok(match sign {
        Sign::Positive => Region::positive(Trapezoid::from_intervals(intervals)),
        Sign::Negative => Region::negative(Trapezoid::from_intervals(intervals)),
    })
}

/// One line: values space-separated in ascending dimension order, integers
/// without a slash, non-integers as `p/q`.
pub fn render_vector(v: &Vector, vars: &VarTable) -> String {
    debug_assert_eq!(v.dim_count(), vars.dim_count());
    v.values()
        .iter()
        .map(render_rational)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a [`render_vector`] line back into a vector.
pub fn parse_vector(text: &str, vars: &VarTable) -> Result<Vector, ParseError> {
    let mut values = Vec::new();
    for tok in text.split_whitespace() {
        let value = parse_rational_text(tok)
            .ok_or_else(|| ParseError::new(1, 1, format!("bad rational literal `{tok}`")))?;
        values.push(value);
    }
    if values.len() != vars.len() {
        return Err(ParseError::new(
            1,
            1,
            format!("expected {} values, got {}", vars.len(), values.len()),
        ));
    }
    Ok(Vector::new(values))
}
