//! Evaluation and forward-mode differentiation.
//!
//! Directional derivatives are propagated with dual numbers in a single pass
//! per direction, so they are exact up to float rounding, with no
//! truncation error. The central-difference routine [`fd_directional`] is kept as an
//! independent oracle and is also what the certificate verifier uses.

use super::{Elementary, Expr, ExprError, Point};

/// Value/derivative pair for forward-mode propagation.
#[derive(Debug, Clone, Copy)]
struct Dual {
    val: f64,
    der: f64,
}

impl Dual {
    fn constant(val: f64) -> Self {
        Self { val, der: 0.0 }
    }
}

fn domain_error(message: impl Into<String>, subtree: &Expr) -> ExprError {
    ExprError::Domain {
        message: message.into(),
        subexpr: subtree.to_string(),
    }
}

/// Standard real evaluation of `e` at `p`.
pub fn evaluate(e: &Expr, p: &Point) -> Result<f64, ExprError> {
    let value = eval_f64(e, p)?;
    if !value.is_finite() {
        return Err(domain_error("non-finite result", e));
    }
    Ok(value)
}

fn eval_f64(e: &Expr, p: &Point) -> Result<f64, ExprError> {
    Ok(match e {
        Expr::Constant(c) => *c,
        Expr::Variable(name) => p
            .get(name)
            .ok_or_else(|| ExprError::MissingVariable { name: name.clone() })?,
        Expr::Negate(inner) => -eval_f64(inner, p)?,
        Expr::Add(l, r) => eval_f64(l, p)? + eval_f64(r, p)?,
        Expr::Sub(l, r) => eval_f64(l, p)? - eval_f64(r, p)?,
        Expr::Mul(l, r) => eval_f64(l, p)? * eval_f64(r, p)?,
        Expr::Div(l, r) => {
            let denom = eval_f64(r, p)?;
            if denom == 0.0 {
                return Err(domain_error("division by zero", e));
            }
            eval_f64(l, p)? / denom
        }
        Expr::IntPow(base, k) => {
            let b = eval_f64(base, p)?;
            if b == 0.0 && *k < 0 {
                return Err(domain_error("zero raised to a negative power", e));
            }
            b.powi(*k)
        }
        Expr::Func(func, arg) => {
            let x = eval_f64(arg, p)?;
            match func {
                Elementary::Sin => x.sin(),
                Elementary::Cos => x.cos(),
                Elementary::Exp => x.exp(),
                Elementary::Log => {
                    if x <= 0.0 {
                        return Err(domain_error("log of a non-positive argument", e));
                    }
                    x.ln()
                }
                Elementary::Sqrt => {
                    if x < 0.0 {
                        return Err(domain_error("sqrt of a negative argument", e));
                    }
                    x.sqrt()
                }
            }
        }
    })
}

/// Directional derivative `d/dt e(p + t v)` at `t = 0`, by one dual-number pass.
pub fn directional_derivative(e: &Expr, p: &Point, v: &[f64]) -> Result<f64, ExprError> {
    if v.len() != p.dim() {
        return Err(ExprError::DimensionMismatch {
            expected: p.dim(),
            got: v.len(),
        });
    }
    let d = eval_dual(e, p, v)?;
    if !d.val.is_finite() || !d.der.is_finite() {
        return Err(domain_error("non-finite result", e));
    }
    Ok(d.der)
}

/// Row of partial derivatives of `e` at `p`, assembled from one dual-number
/// pass per coordinate direction.
pub fn gradient(e: &Expr, p: &Point) -> Result<Vec<f64>, ExprError> {
    let n = p.dim();
    let mut direction = vec![0.0; n];
    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        direction[i] = 1.0;
        grad.push(directional_derivative(e, p, &direction)?);
        direction[i] = 0.0;
    }
    Ok(grad)
}

/// Central difference `(e(p + h v) - e(p - h v)) / (2 h)`: the independent
/// oracle against which the dual-number path is checked.
pub fn fd_directional(e: &Expr, p: &Point, v: &[f64], h: f64) -> Result<f64, ExprError> {
    if h <= 0.0 || !h.is_finite() {
        return Err(ExprError::InvalidProbe(format!("step h = {h} must be positive")));
    }
    let plus = evaluate(e, &p.shifted(v, h)?)?;
    let minus = evaluate(e, &p.shifted(v, -h)?)?;
    Ok((plus - minus) / (2.0 * h))
}

fn eval_dual(e: &Expr, p: &Point, v: &[f64]) -> Result<Dual, ExprError> {
    Ok(match e {
        Expr::Constant(c) => Dual::constant(*c),
        Expr::Variable(name) => {
            let idx = p
                .names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| ExprError::MissingVariable { name: name.clone() })?;
            Dual {
                val: p.values()[idx],
                der: v[idx],
            }
        }
        Expr::Negate(inner) => {
            let a = eval_dual(inner, p, v)?;
            Dual {
                val: -a.val,
                der: -a.der,
            }
        }
        Expr::Add(l, r) => {
            let (a, b) = (eval_dual(l, p, v)?, eval_dual(r, p, v)?);
            Dual {
                val: a.val + b.val,
                der: a.der + b.der,
            }
        }
        Expr::Sub(l, r) => {
            let (a, b) = (eval_dual(l, p, v)?, eval_dual(r, p, v)?);
            Dual {
                val: a.val - b.val,
                der: a.der - b.der,
            }
        }
        Expr::Mul(l, r) => {
            let (a, b) = (eval_dual(l, p, v)?, eval_dual(r, p, v)?);
            Dual {
                val: a.val * b.val,
                der: a.val * b.der + a.der * b.val,
            }
        }
        Expr::Div(l, r) => {
            let (a, b) = (eval_dual(l, p, v)?, eval_dual(r, p, v)?);
            if b.val == 0.0 {
                return Err(domain_error("division by zero", e));
            }
            Dual {
                val: a.val / b.val,
                der: (a.der * b.val - a.val * b.der) / (b.val * b.val),
            }
        }
        Expr::IntPow(base, k) => {
            let a = eval_dual(base, p, v)?;
            let k = *k;
            if a.val == 0.0 && k < 0 {
                return Err(domain_error("zero raised to a negative power", e));
            }
            if k == 0 {
                Dual::constant(1.0)
            } else {
                // d(u^k) = k u^(k-1) u'; at u = 0 with k >= 2 the factor is 0.
                let der = if a.val == 0.0 && k >= 2 {
                    0.0
                } else {
                    f64::from(k) * a.val.powi(k - 1) * a.der
                };
                Dual {
                    val: a.val.powi(k),
                    der,
                }
            }
        }
        Expr::Func(func, arg) => {
            let a = eval_dual(arg, p, v)?;
            match func {
                Elementary::Sin => Dual {
                    val: a.val.sin(),
                    der: a.val.cos() * a.der,
                },
                Elementary::Cos => Dual {
                    val: a.val.cos(),
                    der: -a.val.sin() * a.der,
                },
                Elementary::Exp => {
                    let ex = a.val.exp();
                    Dual {
                        val: ex,
                        der: ex * a.der,
                    }
                }
                Elementary::Log => {
                    if a.val <= 0.0 {
                        return Err(domain_error("log of a non-positive argument", e));
                    }
                    Dual {
                        val: a.val.ln(),
                        der: a.der / a.val,
                    }
                }
                Elementary::Sqrt => {
                    if a.val < 0.0 {
                        return Err(domain_error("sqrt of a negative argument", e));
                    }
                    if a.val == 0.0 {
                        return Err(domain_error("sqrt derivative undefined at zero", e));
                    }
                    let root = a.val.sqrt();
                    Dual {
                        val: root,
                        der: a.der / (2.0 * root),
                    }
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_expression;
    use super::*;

    fn parse(text: &str, names: &[&str]) -> Expr {
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        parse_expression(text, &vars).unwrap()
    }

    fn point(pairs: &[(&str, f64)]) -> Point {
        Point::new(pairs.iter().map(|(n, v)| (n.to_string(), *v))).unwrap()
    }

    #[test]
    fn evaluate_basics() {
        let e = parse("x^2 + y", &["x", "y"]);
        let p = point(&[("x", 3.0), ("y", 2.0)]);
        assert_eq!(evaluate(&e, &p).unwrap(), 11.0);

        let s = parse("sin(x)*y", &["x", "y"]);
        let p0 = point(&[("x", 0.0), ("y", 5.0)]);
        assert_eq!(evaluate(&s, &p0).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_domain_errors_identify_subtree() {
        let e = parse("log(x)", &["x"]);
        let p = point(&[("x", -1.0)]);
        match evaluate(&e, &p) {
            Err(ExprError::Domain { subexpr, .. }) => assert_eq!(subexpr, "log(x)"),
            other => panic!("expected domain error, got {other:?}"),
        }
        let d = parse("1/(x - 1)", &["x"]);
        assert!(matches!(
            evaluate(&d, &point(&[("x", 1.0)])),
            Err(ExprError::Domain { .. })
        ));
        assert!(matches!(
            evaluate(&parse("x^-1", &["x"]), &point(&[("x", 0.0)])),
            Err(ExprError::Domain { .. })
        ));
    }

    #[test]
    fn directional_derivative_examples() {
        let e = parse("x^2 + y", &["x", "y"]);
        let p = point(&[("x", 3.0), ("y", 2.0)]);
        assert_eq!(directional_derivative(&e, &p, &[1.0, 0.0]).unwrap(), 6.0);

        // Zero direction gives a zero derivative regardless of the expression.
        let m = parse("x*y", &["x", "y"]);
        let q = point(&[("x", 4.0), ("y", -7.0)]);
        assert_eq!(directional_derivative(&m, &q, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn gradient_examples() {
        let e = parse("x^2 + y", &["x", "y"]);
        let p = point(&[("x", 3.0), ("y", 2.0)]);
        assert_eq!(gradient(&e, &p).unwrap(), vec![6.0, 1.0]);

        let s = parse("sin(x)*y", &["x", "y"]);
        let p0 = point(&[("x", 0.0), ("y", 5.0)]);
        assert_eq!(gradient(&s, &p0).unwrap(), vec![5.0, 0.0]);
    }

    #[test]
    fn fd_matches_closed_forms() {
        let sq = parse("x^2", &["x"]);
        let p = point(&[("x", 3.0)]);
        let fd = fd_directional(&sq, &p, &[1.0], 1e-5).unwrap();
        assert!((fd - 6.0).abs() < 1e-9, "fd = {fd}");

        let ex = parse("exp(x)", &["x"]);
        let p0 = point(&[("x", 0.0)]);
        let fd = fd_directional(&ex, &p0, &[1.0], 1e-4).unwrap();
        assert!((fd - 1.0).abs() < 1e-8, "fd = {fd}");
    }

    #[test]
    fn fd_symmetric_difference_of_even_function_is_zero() {
        // sqrt(x^2) is |x|; the central difference at 0 cancels exactly.
        let e = parse("sqrt(x^2)", &["x"]);
        let origin = point(&[("x", 0.0)]);
        assert_eq!(fd_directional(&e, &origin, &[1.0], 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn ad_agrees_with_fd_on_a_transcendental_mix() {
        let e = parse("exp(x/2)*sin(y) + log(x + 2)/sqrt(y + 1)", &["x", "y"]);
        let p = point(&[("x", 0.7), ("y", 1.3)]);
        for v in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8]] {
            let ad = directional_derivative(&e, &p, &v).unwrap();
            let fd = fd_directional(&e, &p, &v, 1e-5).unwrap();
            assert!(
                (ad - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                "ad = {ad}, fd = {fd}"
            );
        }
    }

    #[test]
    fn dual_domain_edges() {
        let sq = parse("sqrt(x)", &["x"]);
        let origin = point(&[("x", 0.0)]);
        // Plain evaluation of sqrt(0) is fine; its derivative is not.
        assert_eq!(evaluate(&sq, &origin).unwrap(), 0.0);
        assert!(directional_derivative(&sq, &origin, &[1.0]).is_err());

        let pow = parse("x^3", &["x"]);
        assert_eq!(directional_derivative(&pow, &origin, &[1.0]).unwrap(), 0.0);
    }
}
