//! Fourier–Motzkin elimination over homogeneous systems of weak and strict
//! inequalities. Brute-force and exponential in the dimension, which is why
//! it is guarded to small `n`. It exists as an independent oracle for the
//! simplex-based decisions, not as a production path.

use super::{common_dimension, LinFunc, LinalgError};
use crate::rational::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Hard cap on the ambient dimension for elimination.
pub const FM_MAX_DIM: usize = 6;

/// One homogeneous inequality `coeffs.x > 0` (strict) or `>= 0`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Inequality {
    coeffs: Vec<Rat>,
    strict: bool,
}

/// `true` iff `{ x : phis[i].x >= 0 for all i, a.x < 0 }` is empty,
/// equivalently iff `a` lies in the cone generated by the `phis`.
pub fn fm_oracle(phis: &[LinFunc], a: &LinFunc) -> Result<bool, LinalgError> {
    common_dimension(phis, Some(a))?;
    // a.x < 0 becomes (-a).x > 0.
    fm_mixed_empty(phis, &[a.negated()])
}

/// `true` iff the all-strict system `{ x : phis[i].x > 0 for all i }` is empty.
pub fn fm_oracle_strict(phis: &[LinFunc]) -> Result<bool, LinalgError> {
    fm_mixed_empty(&[], phis)
}

/// General homogeneous emptiness test:
/// `{ x : weak[i].x >= 0 for all i, strict[j].x > 0 for all j }`.
/// An empty strict part makes the system vacuously nonempty (x = 0).
pub fn fm_mixed_empty(weak: &[LinFunc], strict: &[LinFunc]) -> Result<bool, LinalgError> {
    if strict.is_empty() {
        return Ok(false);
    }
    let n = match (weak.first(), strict.first()) {
        (Some(w), _) => common_dimension(weak, Some(&strict[0])).and_then(|_| {
            common_dimension(strict, Some(w))
        })?,
        (None, Some(_)) => common_dimension(strict, None)?,
        (None, None) => unreachable!(),
    };
    guard(n)?;
    let mut system: Vec<Inequality> = weak
        .iter()
        .map(|phi| Inequality {
            coeffs: phi.coeffs().to_vec(),
            strict: false,
        })
        .collect();
    system.extend(strict.iter().map(|phi| Inequality {
        coeffs: phi.coeffs().to_vec(),
        strict: true,
    }));
    Ok(system_empty(system, n))
}

fn guard(n: usize) -> Result<(), LinalgError> {
    if n > FM_MAX_DIM {
        return Err(LinalgError::DimensionGuard {
            dim: n,
            max: FM_MAX_DIM,
        });
    }
    Ok(())
}

/// Eliminate every variable; the system is empty iff a contradictory
/// constant row `0 > 0` appears.
fn system_empty(mut system: Vec<Inequality>, dim: usize) -> bool {
    for var in 0..dim {
        let mut next: Vec<Inequality> = Vec::new();
        let mut lower: Vec<Inequality> = Vec::new(); // positive coefficient on var
        let mut upper: Vec<Inequality> = Vec::new(); // negative coefficient on var
        for ineq in system {
            if ineq.coeffs.iter().all(Rat::is_zero) {
                if ineq.strict {
                    return true; // 0 > 0
                }
                continue;
            }
            if ineq.coeffs[var].is_positive() {
                lower.push(ineq);
            } else if ineq.coeffs[var].is_negative() {
                upper.push(ineq);
            } else {
                next.push(ineq);
            }
        }
        for lo in &lower {
            for hi in &upper {
                // (-hi[var]) * lo + lo[var] * hi cancels the variable; both
                // multipliers are positive, so strictness is inherited from
                // either side.
                let alpha = -&hi.coeffs[var];
                let beta = lo.coeffs[var].clone();
                let coeffs: Vec<Rat> = lo
                    .coeffs
                    .iter()
                    .zip(&hi.coeffs)
                    .map(|(l, h)| l * &alpha + h * &beta)
                    .collect();
                debug_assert!(coeffs[var].is_zero());
                let combined = Inequality {
                    coeffs,
                    strict: lo.strict || hi.strict,
                };
                if combined.coeffs.iter().all(Rat::is_zero) {
                    if combined.strict {
                        return true;
                    }
                } else {
                    next.push(normalize(combined));
                }
            }
        }
        next.sort();
        next.dedup();
        system = next;
    }
    // Homogeneous rows with every variable eliminated are all zero.
    system.iter().any(|ineq| ineq.strict)
}

/// Scale to a primitive integer vector (positive scaling only, so the
/// inequality is unchanged); keeps coefficient growth in check.
fn normalize(ineq: Inequality) -> Inequality {
    let mut denom_lcm = BigInt::from(1);
    for c in &ineq.coeffs {
        denom_lcm = lcm(&denom_lcm, c.denom());
    }
    let ints: Vec<BigInt> = ineq
        .coeffs
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for i in &ints {
        content = gcd(&content, i);
    }
    if content.is_zero() {
        return ineq;
    }
    Inequality {
        coeffs: ints
            .into_iter()
            .map(|i| Rat::from_integer(i / &content))
            .collect(),
        strict: ineq.strict,
    }
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / gcd(a, b)
}
