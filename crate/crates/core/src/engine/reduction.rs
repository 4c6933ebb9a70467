//! Equality-constraint elimination.
//!
//! With independent equality gradients the ambient space splits as
//! `kernel ⊕ pivot-axes`: the kernel of the equality gradients carries a
//! reduced inequality-only problem (gradients are projected by pairing with
//! the kernel basis), and the square submatrix of the equality gradients on
//! the pivot coordinates is exactly invertible, which is what the
//! multiplier recovery solves against.

use super::{EngineError, GradientTable};
use crate::linalg::{
    nullspace_basis, rank_independent, solve_square, strict_feasibility, LinFunc, StrictWitness,
};
use crate::rational::{max_norm, Rat};
use num_traits::{One, Signed, Zero};

/// The reduced, inequality-only view of a problem with equality constraints.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    /// Basis of the kernel of the equality gradients (`n - q` vectors).
    pub kernel_basis: Vec<Vec<Rat>>,
    /// Pivot coordinates of the elimination (`q` indices); the equality
    /// gradients restricted to these columns form an invertible square block.
    pub pivot_columns: Vec<usize>,
    /// Objective gradient in kernel coordinates.
    pub objective: LinFunc,
    /// Active inequality gradients in kernel coordinates.
    pub active: Vec<LinFunc>,
}

/// Linear independence of the equality gradients, with the exact rank.
pub fn licq_check(equalities: &[LinFunc]) -> Result<(bool, usize), EngineError> {
    Ok(rank_independent(equalities)?)
}

/// Restrict the problem to the kernel of the equality gradients.
///
/// Requires LICQ. When `q = n` the kernel is trivial and the reduction is
/// zero-dimensional: no projected gradients remain and stationarity is
/// purely a matter of recovering the equality multipliers.
pub fn reduce_equalities(table: &GradientTable) -> Result<ReducedProblem, EngineError> {
    let q = table.equalities.len();
    let (independent, rank) = licq_check(&table.equalities)?;
    if !independent {
        return Err(EngineError::LicqViolated { rank, count: q });
    }
    if q == 0 {
        // Nothing to eliminate; the kernel is the whole space.
        let n = table.dim();
        let mut basis = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            basis.push(v);
        }
        return Ok(ReducedProblem {
            kernel_basis: basis,
            pivot_columns: Vec::new(),
            objective: table.objective.clone(),
            active: table.active.clone(),
        });
    }
    let ns = nullspace_basis(&table.equalities)?;
    let project = |g: &LinFunc| LinFunc::new(ns.basis.iter().map(|b| g.apply(b)).collect());
    Ok(ReducedProblem {
        objective: project(&table.objective),
        active: table.active.iter().map(project).collect(),
        kernel_basis: ns.basis,
        pivot_columns: ns.pivots,
    })
}

/// Recover the equality multipliers for reduced-stationary `lambda`.
///
/// Writes `w = lambda[0] grad_obj + sum(lambda[i] grad_gi)` and solves the
/// square system `(equality block on pivots)^T mu = -w|pivots`; because `w`
/// annihilates the kernel it lies in the row space of the equality
/// gradients, so the recovered `mu` makes the full stationarity identity
/// hold on every coordinate, exactly; this is verified before returning.
pub fn recover_mu(
    lambda: &[Rat],
    table: &GradientTable,
    reduced: &ReducedProblem,
) -> Result<Vec<Rat>, EngineError> {
    if lambda.len() != table.active.len() + 1 {
        return Err(EngineError::Malformed(format!(
            "expected {} multipliers, got {}",
            table.active.len() + 1,
            lambda.len()
        )));
    }
    let q = table.equalities.len();
    if q == 0 {
        return Ok(Vec::new());
    }
    let mut w = table.objective.scaled(&lambda[0]);
    for (l, g) in lambda[1..].iter().zip(&table.active) {
        w = w.add_scaled(g, l);
    }
    let matrix: Vec<Vec<Rat>> = reduced
        .pivot_columns
        .iter()
        .map(|&p| {
            table
                .equalities
                .iter()
                .map(|h| h.coeffs()[p].clone())
                .collect()
        })
        .collect();
    let rhs: Vec<Rat> = reduced
        .pivot_columns
        .iter()
        .map(|&p| -&w.coeffs()[p])
        .collect();
    let mu = solve_square(&matrix, &rhs)?;

    let residual = table.stationarity_residual(lambda, &mu);
    if residual.iter().any(|r| !r.is_zero()) {
        return Err(EngineError::CrossCheck(
            "multiplier recovery left a nonzero stationarity residual; \
             the given lambda is not reduced-stationary"
                .into(),
        ));
    }
    Ok(mu)
}

/// Strict direction inside the equality kernel against every active
/// inequality gradient, lifted back to ambient coordinates and box-scaled.
pub fn mfcq_witness_equality(
    table: &GradientTable,
) -> Result<Option<StrictWitness>, EngineError> {
    let reduced = reduce_equalities(table)?;
    if table.active.is_empty() {
        return Ok(Some(StrictWitness::vacuous()));
    }
    if reduced.kernel_basis.is_empty() {
        // The kernel is trivial; no direction can be strictly positive.
        return Ok(None);
    }
    let Some(found) = strict_feasibility(&reduced.active)? else {
        return Ok(None);
    };
    let n = table.dim();
    let mut direction = vec![Rat::zero(); n];
    for (coord, basis_vec) in found.direction.iter().zip(&reduced.kernel_basis) {
        for k in 0..n {
            direction[k] += coord * &basis_vec[k];
        }
    }
    let norm = max_norm(&direction);
    debug_assert!(norm.is_positive(), "a strict witness cannot lift to zero");
    let direction: Vec<Rat> = direction.iter().map(|x| x / &norm).collect();
    let margin = table
        .active
        .iter()
        .map(|g| g.apply(&direction))
        .min()
        .expect("active set nonempty");
    debug_assert!(margin.is_positive());
    Ok(Some(StrictWitness {
        direction,
        margin: Some(margin),
    }))
}

/// A nontrivial combination `mu` with `sum(mu_j grad_hj) = 0`, for the case
/// of dependent equality gradients. Deterministic choice: the first
/// left-kernel basis vector, scaled so its first nonzero entry is one.
pub fn dependent_equality_mu(equalities: &[LinFunc]) -> Result<Vec<Rat>, EngineError> {
    let q = equalities.len();
    if q == 0 {
        return Err(EngineError::Malformed(
            "dependent-equality certificate needs at least one equality".into(),
        ));
    }
    let n = equalities[0].dim();
    // Left kernel = kernel of the transpose: rows indexed by coordinates.
    let transpose: Vec<LinFunc> = (0..n)
        .map(|k| LinFunc::new(equalities.iter().map(|h| h.coeffs()[k].clone()).collect()))
        .collect();
    let ns = nullspace_basis(&transpose)?;
    let Some(first) = ns.basis.first() else {
        return Err(EngineError::CrossCheck(
            "equality gradients were reported dependent but the left kernel is trivial".into(),
        ));
    };
    let leading = first
        .iter()
        .find(|c| !c.is_zero())
        .expect("kernel basis vectors are nonzero")
        .clone();
    Ok(first.iter().map(|c| c / &leading).collect())
}
