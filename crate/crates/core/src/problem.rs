//! Problem model: maximize an objective subject to inequality constraints
//! `g_i >= 0` and equality constraints `h_j == 0`, plus the line-oriented
//! file format, feasibility checking, and active-set detection.
//!
//! Maximization with `g >= 0` is the only native form; `minimize:` and `<=`
//! are accepted in files and desugared by negation at load time.

use crate::expr::{evaluate, parse_expression, Expr, ExprError, Point};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct LabeledConstraint {
    pub label: String,
    pub expr: Expr,
}

/// A maximization problem over named variables.
#[derive(Debug, Clone)]
pub struct Problem {
    pub variables: Vec<String>,
    pub objective: Expr,
    /// Constraints `expr >= 0`, labels starting with `g`.
    pub inequalities: Vec<LabeledConstraint>,
    /// Constraints `expr == 0`, labels starting with `h`.
    pub equalities: Vec<LabeledConstraint>,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }
}

/// Saturated-inequality bookkeeping at a candidate point.
#[derive(Debug, Clone, Serialize)]
pub struct ActiveSet {
    /// 0-based indices into `Problem::inequalities`, sorted.
    pub active: Vec<usize>,
    /// `g_i` values at the point, for all inequalities in order.
    pub values: Vec<f64>,
    /// Threshold used: `i` is active iff `|g_i| <= tolerance`.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    /// `g_i(x)` in constraint order; feasible direction is `>= 0`.
    pub inequality_values: Vec<f64>,
    /// `h_j(x)` in constraint order; feasible means `== 0` within tolerance.
    pub equality_values: Vec<f64>,
    /// Most negative inequality value, clamped at zero from above.
    pub worst_inequality_violation: f64,
    /// Largest `|h_j(x)|`.
    pub worst_equality_violation: f64,
    pub tolerance: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate constraint label `{label}`")]
    DuplicateLabel { label: String, line: usize },
    #[error("problem file declares no variables")]
    MissingVariables,
    #[error("problem file has no objective line")]
    MissingObjective,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("candidate point is infeasible (worst inequality violation {0:.3e}, worst equality violation {1:.3e})")]
    Infeasible(f64, f64),
}

/// Parse the line-oriented problem format.
///
/// ```text
/// # comment
/// vars: x, y
/// maximize: x + y
/// g1: 1 - x^2 >= 0
/// h1: x^2 + y^2 - 2 == 0
/// point: x = 1, y = 1
/// ```
///
/// Labels starting with `g` declare inequalities, labels starting with `h`
/// declare equalities. The `point:` line is optional.
pub fn load_problem(text: &str) -> Result<(Problem, Option<Point>), ProblemError> {
    let mut variables: Option<Vec<String>> = None;
    let mut objective: Option<Expr> = None;
    let mut inequalities = Vec::new();
    let mut equalities = Vec::new();
    let mut point: Option<Point> = None;
    let mut labels_seen: Vec<String> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(ProblemError::Parse {
                line: line_no,
                column: line.len() + 1,
                message: "expected `key: value`".into(),
            });
        };
        let key = key.trim();
        let value_col = raw_line.find(':').unwrap_or(0) + 2;

        match key {
            "vars" => {
                let names: Vec<String> = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if names.is_empty() {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        column: value_col,
                        message: "empty variable list".into(),
                    });
                }
                for (i, name) in names.iter().enumerate() {
                    let valid = name
                        .chars()
                        .enumerate()
                        .all(|(k, c)| c == '_' || if k == 0 { c.is_ascii_alphabetic() } else { c.is_ascii_alphanumeric() });
                    if !valid {
                        return Err(ProblemError::Parse {
                            line: line_no,
                            column: value_col,
                            message: format!("invalid variable name `{name}`"),
                        });
                    }
                    if names[..i].contains(name) {
                        return Err(ProblemError::Parse {
                            line: line_no,
                            column: value_col,
                            message: format!("duplicate variable `{name}`"),
                        });
                    }
                }
                variables = Some(names);
            }
            "maximize" | "minimize" => {
                if objective.is_some() {
                    return Err(ProblemError::Parse {
                        line: line_no,
                        column: 1,
                        message: "objective declared twice".into(),
                    });
                }
                let vars = variables.as_ref().ok_or(ProblemError::MissingVariables)?;
                let parsed = parse_line_expr(value, vars, line_no, value_col)?;
                objective = Some(if key == "minimize" {
                    Expr::Negate(Box::new(parsed))
                } else {
                    parsed
                });
            }
            "point" => {
                let vars = variables.as_ref().ok_or(ProblemError::MissingVariables)?;
                point = Some(parse_point_line(value, vars, line_no, value_col)?);
            }
            label if label.starts_with('g') || label.starts_with('h') => {
                let vars = variables.as_ref().ok_or(ProblemError::MissingVariables)?;
                if labels_seen.iter().any(|l| l == label) {
                    return Err(ProblemError::DuplicateLabel {
                        label: label.to_string(),
                        line: line_no,
                    });
                }
                labels_seen.push(label.to_string());
                let expr = parse_constraint_body(
                    value,
                    vars,
                    label.starts_with('g'),
                    line_no,
                    value_col,
                )?;
                let constraint = LabeledConstraint {
                    label: label.to_string(),
                    expr,
                };
                if label.starts_with('g') {
                    inequalities.push(constraint);
                } else {
                    equalities.push(constraint);
                }
            }
            other => {
                return Err(ProblemError::Parse {
                    line: line_no,
                    column: 1,
                    message: format!(
                        "unknown key `{other}` (expected vars, maximize, minimize, g*, h*, point)"
                    ),
                });
            }
        }
    }

    let variables = variables.ok_or(ProblemError::MissingVariables)?;
    let objective = objective.ok_or(ProblemError::MissingObjective)?;
    Ok((
        Problem {
            variables,
            objective,
            inequalities,
            equalities,
        },
        point,
    ))
}

fn parse_line_expr(
    value: &str,
    vars: &[String],
    line: usize,
    base_col: usize,
) -> Result<Expr, ProblemError> {
    parse_expression(value, vars).map_err(|e| lift_expr_error(e, line, base_col))
}

fn lift_expr_error(e: ExprError, line: usize, base_col: usize) -> ProblemError {
    let (offset, message) = match &e {
        ExprError::Syntax { offset, message } => (*offset, message.clone()),
        ExprError::UndeclaredVariable { name, offset } => {
            (*offset, format!("undeclared variable `{name}`"))
        }
        ExprError::UnknownFunction { name, offset } => {
            (*offset, format!("unknown function `{name}`"))
        }
        _ => (0, e.to_string()),
    };
    ProblemError::Parse {
        line,
        column: base_col + offset,
        message,
    }
}

/// `lhs >= rhs`, `lhs <= rhs` (inequalities) or `lhs == rhs` (equalities),
/// canonicalized to `expr >= 0` / `expr == 0`.
fn parse_constraint_body(
    value: &str,
    vars: &[String],
    is_inequality: bool,
    line: usize,
    base_col: usize,
) -> Result<Expr, ProblemError> {
    let operators: &[(&str, bool)] = if is_inequality {
        &[(">=", false), ("<=", true)]
    } else {
        &[("==", false)]
    };
    for (op, swap) in operators {
        if let Some(pos) = value.find(op) {
            let lhs_text = &value[..pos];
            let rhs_text = &value[pos + op.len()..];
            let lhs = parse_line_expr(lhs_text, vars, line, base_col)?;
            let rhs =
                parse_line_expr(rhs_text, vars, line, base_col + pos + op.len())?;
            let (kept, subtracted) = if *swap { (rhs, lhs) } else { (lhs, rhs) };
            // `expr >= 0` stays as-is instead of becoming `expr - 0`.
            let trivially_zero = matches!(subtracted, Expr::Constant(c) if c == 0.0);
            return Ok(if trivially_zero {
                kept
            } else {
                Expr::Sub(Box::new(kept), Box::new(subtracted))
            });
        }
    }
    Err(ProblemError::Parse {
        line,
        column: base_col,
        message: if is_inequality {
            "inequality constraint needs `>=` or `<=`".into()
        } else {
            "equality constraint needs `==`".into()
        },
    })
}

/// `x = 1, y = -0.5`
fn parse_point_line(
    value: &str,
    vars: &[String],
    line: usize,
    base_col: usize,
) -> Result<Point, ProblemError> {
    let mut pairs: Vec<(String, f64)> = Vec::new();
    for part in value.split(',') {
        let Some((name, num)) = part.split_once('=') else {
            return Err(ProblemError::Parse {
                line,
                column: base_col,
                message: format!("expected `name = value` in point, got `{}`", part.trim()),
            });
        };
        let name = name.trim().to_string();
        if !vars.contains(&name) {
            return Err(ProblemError::Parse {
                line,
                column: base_col,
                message: format!("point names undeclared variable `{name}`"),
            });
        }
        let parsed: f64 = num.trim().parse().map_err(|_| ProblemError::Parse {
            line,
            column: base_col,
            message: format!("invalid number `{}`", num.trim()),
        })?;
        pairs.push((name, parsed));
    }
    // Reorder to the declared variable order and require full coverage.
    let mut ordered = Vec::with_capacity(vars.len());
    for var in vars {
        match pairs.iter().find(|(n, _)| n == var) {
            Some((_, v)) => ordered.push((var.clone(), *v)),
            None => {
                return Err(ProblemError::Parse {
                    line,
                    column: base_col,
                    message: format!("point is missing variable `{var}`"),
                })
            }
        }
    }
    Point::new(ordered).map_err(ProblemError::Expr)
}

/// Evaluate every constraint at `x` and compare against the tolerance band:
/// feasible iff all `g_i >= -tol` and all `|h_j| <= tol`.
pub fn check_feasibility(
    problem: &Problem,
    x: &Point,
    tolerance: f64,
) -> Result<FeasibilityReport, ProblemError> {
    let mut inequality_values = Vec::with_capacity(problem.inequalities.len());
    for c in &problem.inequalities {
        inequality_values.push(evaluate(&c.expr, x)?);
    }
    let mut equality_values = Vec::with_capacity(problem.equalities.len());
    for c in &problem.equalities {
        equality_values.push(evaluate(&c.expr, x)?);
    }
    let worst_inequality_violation = inequality_values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(-v))
        .max(0.0);
    let worst_equality_violation = equality_values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let feasible =
        worst_inequality_violation <= tolerance && worst_equality_violation <= tolerance;
    Ok(FeasibilityReport {
        inequality_values,
        equality_values,
        worst_inequality_violation,
        worst_equality_violation,
        tolerance,
        feasible,
    })
}

/// Partition the inequalities into active (`|g_i| <= tol_active`) and
/// inactive. Refuses infeasible points: certificates at infeasible points
/// are meaningless.
pub fn detect_active_set(
    problem: &Problem,
    x: &Point,
    tol_active: f64,
    tol_feasibility: f64,
) -> Result<ActiveSet, ProblemError> {
    let report = check_feasibility(problem, x, tol_feasibility)?;
    if !report.feasible {
        return Err(ProblemError::Infeasible(
            report.worst_inequality_violation,
            report.worst_equality_violation,
        ));
    }
    let active: Vec<usize> = report
        .inequality_values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= tol_active)
        .map(|(i, _)| i)
        .collect();
    Ok(ActiveSet {
        active,
        values: report.inequality_values,
        tolerance: tol_active,
    })
}
