//! Two-sided cone membership decisions and strict-feasibility search.
//!
//! `farkas_decide` settles, exactly, whether a target functional is a
//! nonnegative combination of given functionals. The two answers are
//! mutually exclusive by construction: if `a = sum(lambda_i phi_i)` with
//! `lambda >= 0` and `phi_i.x >= 0` for all `i`, then `a.x >= 0`, so no
//! separator can coexist with a combination.

use super::simplex::{solve, Lp, LpResult};
use super::{common_dimension, LinFunc, LinalgError};
use crate::rational::Rat;
use num_traits::{One, Signed, Zero};

/// Outcome of the membership decision: exactly one side holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeCertificate {
    /// `a = sum(lambda[i] * phis[i])` with every `lambda[i] >= 0`, exactly.
    Combination { lambda: Vec<Rat> },
    /// `phis[i].x >= 0` for all `i` and `a.x < 0`, exactly.
    Separator { x: Vec<Rat> },
}

impl ConeCertificate {
    /// Exact validity check against the instance that produced it.
    pub fn verify(&self, phis: &[LinFunc], a: &LinFunc) -> bool {
        match self {
            ConeCertificate::Combination { lambda } => {
                if lambda.len() != phis.len() || lambda.iter().any(|l| l.is_negative()) {
                    return false;
                }
                let mut combo = LinFunc::zero(a.dim());
                for (l, phi) in lambda.iter().zip(phis) {
                    combo = combo.add_scaled(phi, l);
                }
                combo == *a
            }
            ConeCertificate::Separator { x } => {
                x.len() == a.dim()
                    && phis.iter().all(|phi| !phi.apply(x).is_negative())
                    && a.apply(x).is_negative()
            }
        }
    }
}

/// Strict-feasibility witness for `phis[i].v > 0` for all `i`.
///
/// `margin` is `None` exactly when the family was empty: the conjunction
/// over an empty index set holds vacuously and the witness carries no
/// quantitative content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictWitness {
    pub direction: Vec<Rat>,
    pub margin: Option<Rat>,
}

impl StrictWitness {
    pub fn is_vacuous(&self) -> bool {
        self.margin.is_none()
    }

    pub fn vacuous() -> Self {
        Self {
            direction: Vec::new(),
            margin: None,
        }
    }
}

/// Decide whether `a` lies in the convex cone generated by `phis`.
///
/// The membership side is solved as an exact phase-1 simplex on
/// `sum(lambda_i phi_i) = a, lambda >= 0`; when that system is infeasible
/// the dual ray yields the separator.
pub fn farkas_decide(phis: &[LinFunc], a: &LinFunc) -> Result<ConeCertificate, LinalgError> {
    let n = common_dimension(phis, Some(a))?;
    if phis.is_empty() {
        return Ok(if a.is_zero() {
            ConeCertificate::Combination { lambda: Vec::new() }
        } else {
            // a.(-a) = -|a|^2 < 0 with no side conditions to meet.
            ConeCertificate::Separator {
                x: a.coeffs().iter().map(|c| -c).collect(),
            }
        });
    }

    // Coefficient equation k of `sum(lambda_i phi_i) = a`.
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|k| phis.iter().map(|phi| phi.coeffs()[k].clone()).collect())
        .collect();
    let rhs: Vec<Rat> = a.coeffs().to_vec();
    let lp = Lp {
        rows,
        rhs,
        cost: vec![Rat::zero(); phis.len()],
    };
    let certificate = match solve(&lp)? {
        LpResult::Optimal { x, .. } => ConeCertificate::Combination { lambda: x },
        LpResult::Infeasible { dual } => ConeCertificate::Separator {
            x: dual.iter().map(|y| -y).collect(),
        },
        LpResult::Unbounded => unreachable!("feasibility problem has constant cost"),
    };
    debug_assert!(certificate.verify(phis, a));
    Ok(certificate)
}

/// Decide nonemptiness of the open cone `{ v : phis[i].v > 0 for all i }`.
///
/// Strict feasibility is compiled to "maximize s subject to
/// `phis[i].v >= s` and `-1 <= v_j <= 1`"; the cone is nonempty iff the
/// optimal margin is positive, and the box keeps the problem bounded.
pub fn strict_feasibility(phis: &[LinFunc]) -> Result<Option<StrictWitness>, LinalgError> {
    if phis.is_empty() {
        return Ok(Some(StrictWitness::vacuous()));
    }
    let n = common_dimension(phis, None)?;
    let m = phis.len();

    // Columns: v+ (n), v- (n), s+ , s-, surplus u (m), box slacks r (n), t (n).
    let cols = 4 * n + m + 2;
    let (vp, vm) = (0, n);
    let (sp, sm) = (2 * n, 2 * n + 1);
    let u0 = 2 * n + 2;
    let r0 = u0 + m;
    let t0 = r0 + n;

    let mut rows = Vec::with_capacity(m + 2 * n);
    let mut rhs = Vec::with_capacity(m + 2 * n);
    for (i, phi) in phis.iter().enumerate() {
        let mut row = vec![Rat::zero(); cols];
        for (j, c) in phi.coeffs().iter().enumerate() {
            row[vp + j] = c.clone();
            row[vm + j] = -c;
        }
        row[sp] = -Rat::one();
        row[sm] = Rat::one();
        row[u0 + i] = -Rat::one();
        rows.push(row);
        rhs.push(Rat::zero());
    }
    for j in 0..n {
        let mut row = vec![Rat::zero(); cols];
        row[vp + j] = Rat::one();
        row[r0 + j] = Rat::one();
        rows.push(row);
        rhs.push(Rat::one());

        let mut row = vec![Rat::zero(); cols];
        row[vm + j] = Rat::one();
        row[t0 + j] = Rat::one();
        rows.push(row);
        rhs.push(Rat::one());
    }
    let mut cost = vec![Rat::zero(); cols];
    cost[sp] = -Rat::one();
    cost[sm] = Rat::one();

    let lp = Lp { rows, rhs, cost };
    match solve(&lp)? {
        LpResult::Optimal { x, objective } => {
            let margin_opt = -objective;
            if !margin_opt.is_positive() {
                return Ok(None);
            }
            let direction: Vec<Rat> = (0..n).map(|j| &x[vp + j] - &x[vm + j]).collect();
            // Report the margin this particular direction achieves.
            let margin = phis
                .iter()
                .map(|phi| phi.apply(&direction))
                .min()
                .expect("nonempty family");
            debug_assert!(margin >= margin_opt);
            Ok(Some(StrictWitness {
                direction,
                margin: Some(margin),
            }))
        }
        LpResult::Infeasible { .. } => unreachable!("v = 0, s = 0 is always feasible"),
        LpResult::Unbounded => unreachable!("margin is bounded by the box"),
    }
}

/// Search for a nonnegative combination by minimizing the l1 gap
/// `min sum(|sum(lambda_i phi_i) - a|)` over `lambda >= 0`: a combination
/// exists iff the optimum is exactly zero. A second route to the
/// membership side, independent of the phase-1 construction inside
/// [`farkas_decide`]; used to confirm certificate exclusivity.
pub fn combination_search(phis: &[LinFunc], a: &LinFunc) -> Result<Option<Vec<Rat>>, LinalgError> {
    let n = common_dimension(phis, Some(a))?;
    let m = phis.len();

    // Columns: lambda (m), gap+ (n), gap- (n).
    let cols = m + 2 * n;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![Rat::zero(); cols];
        for (i, phi) in phis.iter().enumerate() {
            row[i] = phi.coeffs()[k].clone();
        }
        row[m + k] = Rat::one();
        row[m + n + k] = -Rat::one();
        rows.push(row);
    }
    let rhs: Vec<Rat> = a.coeffs().to_vec();
    let mut cost = vec![Rat::zero(); cols];
    for c in cost.iter_mut().skip(m) {
        *c = Rat::one();
    }

    let lp = Lp { rows, rhs, cost };
    match solve(&lp)? {
        LpResult::Optimal { x, objective } => {
            if objective.is_zero() {
                Ok(Some(x[..m].to_vec()))
            } else {
                Ok(None)
            }
        }
        LpResult::Infeasible { .. } => unreachable!("the gap variables absorb any target"),
        LpResult::Unbounded => unreachable!("the objective is bounded below by zero"),
    }
}

/// Search for a separator for `{ x : phis[i].x >= 0, a.x < 0 }` by
/// maximizing `-a.x` over the box-truncated cone. Independent of the dual
/// route inside [`farkas_decide`]; used to confirm certificate exclusivity.
pub fn separator_search(phis: &[LinFunc], a: &LinFunc) -> Result<Option<Vec<Rat>>, LinalgError> {
    let n = common_dimension(phis, Some(a))?;
    let m = phis.len();

    let cols = 2 * n + m + 2 * n;
    let (xp, xm) = (0, n);
    let u0 = 2 * n;
    let r0 = u0 + m;
    let t0 = r0 + n;

    let mut rows = Vec::with_capacity(m + 2 * n);
    let mut rhs = Vec::with_capacity(m + 2 * n);
    for (i, phi) in phis.iter().enumerate() {
        let mut row = vec![Rat::zero(); cols];
        for (j, c) in phi.coeffs().iter().enumerate() {
            row[xp + j] = c.clone();
            row[xm + j] = -c;
        }
        row[u0 + i] = -Rat::one();
        rows.push(row);
        rhs.push(Rat::zero());
    }
    for j in 0..n {
        let mut row = vec![Rat::zero(); cols];
        row[xp + j] = Rat::one();
        row[r0 + j] = Rat::one();
        rows.push(row);
        rhs.push(Rat::one());

        let mut row = vec![Rat::zero(); cols];
        row[xm + j] = Rat::one();
        row[t0 + j] = Rat::one();
        rows.push(row);
        rhs.push(Rat::one());
    }
    // minimize a.x = a.(x+ - x-)
    let mut cost = vec![Rat::zero(); cols];
    for (j, c) in a.coeffs().iter().enumerate() {
        cost[xp + j] = c.clone();
        cost[xm + j] = -c;
    }

    let lp = Lp { rows, rhs, cost };
    match solve(&lp)? {
        LpResult::Optimal { x, objective } => {
            if objective.is_negative() {
                Ok(Some((0..n).map(|j| &x[xp + j] - &x[xm + j]).collect()))
            } else {
                Ok(None)
            }
        }
        LpResult::Infeasible { .. } => unreachable!("x = 0 is always feasible"),
        LpResult::Unbounded => unreachable!("objective is bounded on the box"),
    }
}
