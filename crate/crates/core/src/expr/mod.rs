//! Scalar expressions over named real variables: parsing, evaluation,
//! forward-mode differentiation, and differentiability probes.

mod eval;
mod parse;
mod probe;

pub use eval::{directional_derivative, evaluate, fd_directional, gradient};
pub use parse::parse_expression;
pub use probe::{frechet_probe, FrechetReport};

use std::fmt;
use thiserror::Error;

/// Unary elementary functions available in the expression grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Elementary::Sin,
            "cos" => Elementary::Cos,
            "exp" => Elementary::Exp,
            "log" => Elementary::Log,
            "sqrt" => Elementary::Sqrt,
            _ => return None,
        })
    }
}

/// Immutable expression tree. Produced by [`parse_expression`]; integer
/// exponents may be negative.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(String),
    Negate(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    IntPow(Box<Expr>, i32),
    Func(Elementary, Box<Expr>),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Negate(..) => 3,
            Expr::IntPow(..) => 4,
            Expr::Constant(_) | Expr::Variable(_) | Expr::Func(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parent: u8, tight: bool) -> fmt::Result {
        let own = self.precedence();
        let needs_parens = own < parent || (tight && own == parent);
        if needs_parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Variable(name) => write!(f, "{name}"),
            Expr::Negate(inner) => {
                write!(f, "-")?;
                inner.fmt_child(f, 3, false)
            }
            Expr::Add(l, r) => {
                l.fmt_child(f, 1, false)?;
                write!(f, " + ")?;
                r.fmt_child(f, 1, true)
            }
            Expr::Sub(l, r) => {
                l.fmt_child(f, 1, false)?;
                write!(f, " - ")?;
                r.fmt_child(f, 1, true)
            }
            Expr::Mul(l, r) => {
                l.fmt_child(f, 2, false)?;
                write!(f, "*")?;
                r.fmt_child(f, 2, true)
            }
            Expr::Div(l, r) => {
                l.fmt_child(f, 2, false)?;
                write!(f, "/")?;
                r.fmt_child(f, 2, true)
            }
            Expr::IntPow(base, k) => {
                // The base must reparse as an atom; anything weaker gets parens.
                match **base {
                    Expr::Variable(_) | Expr::Func(..) => write!(f, "{base}")?,
                    Expr::Constant(c) if c >= 0.0 => write!(f, "{base}")?,
                    _ => write!(f, "({base})")?,
                }
                write!(f, "^{k}")
            }
            Expr::Func(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Evaluation point: ordered map from variable name to a finite value.
///
/// The order fixes the coordinate system used by [`gradient`] and by the
/// direction vectors of [`directional_derivative`].
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    names: Vec<String>,
    values: Vec<f64>,
}

impl Point {
    pub fn new(
        pairs: impl IntoIterator<Item = (impl Into<String>, f64)>,
    ) -> Result<Self, ExprError> {
        let mut names = Vec::new();
        let mut values = Vec::new();
        for (name, value) in pairs {
            let name = name.into();
            if !value.is_finite() {
                return Err(ExprError::NonFiniteValue { context: name });
            }
            if names.contains(&name) {
                return Err(ExprError::DuplicateVariable { name });
            }
            names.push(name);
            values.push(value);
        }
        Ok(Self { names, values })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    /// The point shifted by `t * v` (same coordinate order).
    pub fn shifted(&self, v: &[f64], t: f64) -> Result<Self, ExprError> {
        if v.len() != self.dim() {
            return Err(ExprError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(v)
            .map(|(x, d)| x + t * d)
            .collect();
        if let Some(bad) = values.iter().position(|x| !x.is_finite()) {
            return Err(ExprError::NonFiniteValue {
                context: self.names[bad].clone(),
            });
        }
        Ok(Self {
            names: self.names.clone(),
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared variable `{name}` at offset {offset}")]
    UndeclaredVariable { name: String, offset: usize },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("domain error: {message} in `{subexpr}`")]
    Domain { message: String, subexpr: String },
    #[error("point does not cover variable `{name}`")]
    MissingVariable { name: String },
    #[error("duplicate variable `{name}`")]
    DuplicateVariable { name: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value for `{context}`")]
    NonFiniteValue { context: String },
    #[error("invalid probe setup: {0}")]
    InvalidProbe(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips_structure() {
        let vars: Vec<String> = vec!["x".into(), "y".into()];
        for text in [
            "x^2 + y",
            "-x^2",
            "x - (y + x)",
            "x - y - x",
            "x/(y*x)",
            "sin(x)*y",
            "2*-x",
            "x^-2",
            "-(x + y)",
            "(x + y)^3",
            "exp(log(x) + sqrt(y))",
        ] {
            let parsed = parse_expression(text, &vars).unwrap();
            let reparsed = parse_expression(&parsed.to_string(), &vars).unwrap();
            assert_eq!(parsed, reparsed, "print/parse mismatch for {text}");
        }
    }

    #[test]
    fn point_rejects_non_finite_and_duplicates() {
        assert!(Point::new([("x", f64::NAN)]).is_err());
        assert!(Point::new([("x", 1.0), ("x", 2.0)]).is_err());
        let p = Point::new([("x", 1.0), ("y", 2.0)]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.get("y"), Some(2.0));
        assert_eq!(p.get("z"), None);
    }
}
