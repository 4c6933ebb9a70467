//! The inequality-only multiplier algorithms.
//!
//! Both take the objective gradient and the gradients of the saturated
//! constraints and either produce Fritz John multipliers or refute their
//! existence ("the necessary condition fails at this point"; no claim is
//! made about optimality). The two routes are independent:
//!
//! * `fj_inequality_direct` solves `lambda >= 0, sum lambda = 1,
//!   sum(lambda_i grad_i) = 0` by exact phase-1 simplex.
//! * `fj_inequality_staircase` walks the nested open cones
//!   `A_k = { v : grad_i.v > 0 for i in k..=e }`: existence of multipliers
//!   is equivalent to `A_0` being empty, and the multipliers are assembled
//!   from the minimal nonempty index and one Farkas combination.

use super::{EngineError, FjCertificate, Normalization, Regime};
use crate::linalg::{farkas_decide, strict_feasibility, ConeCertificate, LinFunc, StrictWitness};
use crate::rational::Rat;
use num_traits::{One, Zero};

/// Multipliers exist or they provably do not.
#[derive(Debug, Clone, PartialEq)]
pub enum FjOutcome {
    Certificate(FjCertificate),
    /// No nonzero nonnegative multipliers annihilate the gradients; the
    /// candidate fails the first-order necessary condition.
    Refuted,
}

impl FjOutcome {
    pub fn certificate(&self) -> Option<&FjCertificate> {
        match self {
            FjOutcome::Certificate(c) => Some(c),
            FjOutcome::Refuted => None,
        }
    }
}

fn build_certificate(
    objective: &LinFunc,
    active: &[LinFunc],
    lambda: Vec<Rat>,
    normalization: Normalization,
    regime: Regime,
) -> Result<FjCertificate, EngineError> {
    let mut residual = objective.scaled(&lambda[0]);
    for (l, g) in lambda[1..].iter().zip(active) {
        residual = residual.add_scaled(g, l);
    }
    if !residual.is_zero() {
        return Err(EngineError::CrossCheck(
            "constructed multipliers do not annihilate the gradients".into(),
        ));
    }
    let flags = FjCertificate::table_flags(&lambda, &[], residual.coeffs());
    Ok(FjCertificate {
        lambda,
        mu: Vec::new(),
        normalization,
        regime,
        flags,
    })
}

/// Solve for the multipliers head-on: find `lambda >= 0` with
/// `sum(lambda) = 1` and `lambda[0] grad_obj + sum(lambda[i] grad_i) = 0`.
pub fn fj_inequality_direct(
    objective: &LinFunc,
    active: &[LinFunc],
) -> Result<FjOutcome, EngineError> {
    use crate::linalg::simplex::{solve, Lp, LpResult};

    let n = objective.dim();
    if n == 0 {
        // Zero-dimensional tables are the caller's special case (full
        // equality rank); every multiplier vector is trivially stationary.
        return Err(crate::linalg::LinalgError::DimensionMismatch {
            expected: 1,
            got: 0,
        }
        .into());
    }
    for g in active {
        if g.dim() != n {
            return Err(crate::linalg::LinalgError::DimensionMismatch {
                expected: n,
                got: g.dim(),
            }
            .into());
        }
    }
    let cols = active.len() + 1;
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(n + 1);
    let mut rhs: Vec<Rat> = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut row = Vec::with_capacity(cols);
        row.push(objective.coeffs()[k].clone());
        for g in active {
            row.push(g.coeffs()[k].clone());
        }
        rows.push(row);
        rhs.push(Rat::zero());
    }
    rows.push(vec![Rat::one(); cols]);
    rhs.push(Rat::one());

    let lp = Lp {
        rows,
        rhs,
        cost: vec![Rat::zero(); cols],
    };
    match solve(&lp)? {
        LpResult::Optimal { x, .. } => {
            let regime = if active.is_empty() {
                Regime::Interior
            } else {
                Regime::Direct
            };
            Ok(FjOutcome::Certificate(build_certificate(
                objective,
                active,
                x,
                Normalization::SumOne,
                regime,
            )?))
        }
        LpResult::Infeasible { .. } => Ok(FjOutcome::Refuted),
        LpResult::Unbounded => unreachable!("feasibility problem has constant cost"),
    }
}

/// The staircase construction.
///
/// With gradients indexed `0..=e` (0 = objective), let
/// `A_k = { v : grad_i.v > 0 for all i in k..=e }`. The sets are nested,
/// `A_k` is contained in `A_{k+1}`. Multipliers exist iff `A_0` is empty:
///
/// * `A_0` nonempty: refuted.
/// * `A_e` empty: the last gradient is zero; take `lambda_e = 1`.
/// * otherwise `k = min { i >= 1 : A_i nonempty }` is well defined; the
///   Farkas decision on `-grad_{k-1}` against `grad_k..grad_e` must produce
///   a combination `alpha`, and `lambda_{k-1} = 1, lambda_i = alpha_i`
///   (for `i` in `k..=e`, zero elsewhere) annihilates the gradients.
pub fn fj_inequality_staircase(
    objective: &LinFunc,
    active: &[LinFunc],
) -> Result<FjOutcome, EngineError> {
    if objective.dim() == 0 {
        return Err(crate::linalg::LinalgError::DimensionMismatch {
            expected: 1,
            got: 0,
        }
        .into());
    }
    let e = active.len();
    let mut family = Vec::with_capacity(e + 1);
    family.push(objective.clone());
    family.extend(active.iter().cloned());

    if strict_feasibility(&family)?.is_some() {
        return Ok(FjOutcome::Refuted);
    }

    if e == 0 {
        // A_0 = { v : grad_obj.v > 0 } empty means the objective gradient
        // vanishes; lambda0 = 1 certifies interior stationarity.
        if !objective.is_zero() {
            return Err(EngineError::CrossCheck(
                "empty cone for a single nonzero functional".into(),
            ));
        }
        return Ok(FjOutcome::Certificate(build_certificate(
            objective,
            active,
            vec![Rat::one()],
            Normalization::Unnormalized,
            Regime::Interior,
        )?));
    }

    // A_e = { v : active[e-1].v > 0 }.
    if strict_feasibility(&active[e - 1..])?.is_none() {
        let mut lambda = vec![Rat::zero(); e + 1];
        lambda[e] = Rat::one();
        return Ok(FjOutcome::Certificate(build_certificate(
            objective,
            active,
            lambda,
            Normalization::Unnormalized,
            Regime::Degenerate,
        )?));
    }

    // Minimal nonempty index; exists because A_e is nonempty.
    let mut minimal = e;
    for i in 1..=e {
        if strict_feasibility(&active[i - 1..])?.is_some() {
            minimal = i;
            break;
        }
    }
    let k = minimal;

    let target = if k == 1 { objective } else { &active[k - 2] };
    let cone: &[LinFunc] = &active[k - 1..];
    match farkas_decide(cone, &target.negated())? {
        ConeCertificate::Combination { lambda: alpha } => {
            let mut lambda = vec![Rat::zero(); e + 1];
            lambda[k - 1] = Rat::one();
            for (offset, a) in alpha.into_iter().enumerate() {
                lambda[k + offset] = a;
            }
            Ok(FjOutcome::Certificate(build_certificate(
                objective,
                active,
                lambda,
                Normalization::Unnormalized,
                Regime::Staircase,
            )?))
        }
        ConeCertificate::Separator { .. } => Err(EngineError::CrossCheck(
            "cone A_{k-1} empty yet the Farkas step found a separator".into(),
        )),
    }
}

/// Strict direction against every saturated gradient, or a definitive
/// refutation; with nothing saturated the witness is vacuous.
pub fn mfcq_witness_inequality(
    active: &[LinFunc],
) -> Result<Option<StrictWitness>, EngineError> {
    Ok(strict_feasibility(active)?)
}

/// Recompute the certificate with `lambda0` pinned to one. Requires an MFCQ
/// witness; under it (and given that multipliers exist at all) the Farkas
/// decision on `-grad_obj` is guaranteed to come back as a combination.
pub fn normalize_lambda0(
    cert: &FjCertificate,
    objective: &LinFunc,
    active: &[LinFunc],
    mfcq: Option<&StrictWitness>,
) -> Result<FjCertificate, EngineError> {
    if mfcq.is_none() {
        return Err(EngineError::MfcqRequired);
    }
    if active.is_empty() {
        if !objective.is_zero() {
            return Err(EngineError::CrossCheck(
                "lambda0 normalization without active constraints needs a zero objective gradient"
                    .into(),
            ));
        }
        let mut normalized = build_certificate(
            objective,
            active,
            vec![Rat::one()],
            Normalization::Lambda0One,
            cert.regime,
        )?;
        normalized.flags.e = true;
        return Ok(normalized);
    }
    match farkas_decide(active, &objective.negated())? {
        ConeCertificate::Combination { lambda: alpha } => {
            let mut lambda = Vec::with_capacity(active.len() + 1);
            lambda.push(Rat::one());
            lambda.extend(alpha);
            let mut normalized = build_certificate(
                objective,
                active,
                lambda,
                Normalization::Lambda0One,
                cert.regime,
            )?;
            normalized.flags.e = true;
            Ok(normalized)
        }
        ConeCertificate::Separator { .. } => Err(EngineError::CrossCheck(
            "MFCQ witness present but no lambda0 = 1 combination exists".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use num_traits::Signed;

    fn f(values: &[i64]) -> LinFunc {
        LinFunc::from_integers(values)
    }

    #[test]
    fn direct_balances_opposite_gradients() {
        let outcome = fj_inequality_direct(&f(&[1]), &[f(&[-1])]).unwrap();
        let cert = outcome.certificate().expect("certificate");
        assert_eq!(cert.lambda, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(cert.normalization, Normalization::SumOne);
        assert!(cert.flags.a && cert.flags.b && cert.flags.c && cert.flags.d);
    }

    #[test]
    fn direct_refutes_independent_gradients() {
        let outcome = fj_inequality_direct(&f(&[1, 0]), &[f(&[0, 1])]).unwrap();
        assert_eq!(outcome, FjOutcome::Refuted);
    }

    #[test]
    fn direct_interior_zero_gradient() {
        let outcome = fj_inequality_direct(&f(&[0, 0]), &[]).unwrap();
        let cert = outcome.certificate().expect("certificate");
        assert_eq!(cert.lambda, vec![rat_int(1)]);
        assert_eq!(cert.regime, Regime::Interior);
    }

    #[test]
    fn staircase_degenerate_when_last_gradient_vanishes() {
        let outcome = fj_inequality_staircase(&f(&[1]), &[f(&[0])]).unwrap();
        let cert = outcome.certificate().expect("certificate");
        assert_eq!(cert.lambda, vec![rat_int(0), rat_int(1)]);
        assert_eq!(cert.regime, Regime::Degenerate);
    }

    #[test]
    fn staircase_with_farkas_step() {
        let outcome = fj_inequality_staircase(&f(&[1]), &[f(&[-1])]).unwrap();
        let cert = outcome.certificate().expect("certificate");
        assert_eq!(cert.lambda, vec![rat_int(1), rat_int(1)]);
        assert_eq!(cert.regime, Regime::Staircase);
    }

    #[test]
    fn staircase_three_gradient_trace() {
        // grad_obj = (0,1), grad_1 = (0,0), grad_2 = (1,0):
        // A_1 empty (zero gradient), A_2 nonempty, so k = 2 and the Farkas
        // target is -grad_1 = 0, giving alpha = 0.
        let outcome =
            fj_inequality_staircase(&f(&[0, 1]), &[f(&[0, 0]), f(&[1, 0])]).unwrap();
        let cert = outcome.certificate().expect("certificate");
        assert_eq!(cert.lambda, vec![rat_int(0), rat_int(1), rat_int(0)]);
        assert_eq!(cert.regime, Regime::Staircase);
    }

    #[test]
    fn staircase_refutes_when_a0_nonempty() {
        let outcome = fj_inequality_staircase(&f(&[1]), &[f(&[1])]).unwrap();
        assert_eq!(outcome, FjOutcome::Refuted);
        // And so does the direct algorithm.
        let direct = fj_inequality_direct(&f(&[1]), &[f(&[1])]).unwrap();
        assert_eq!(direct, FjOutcome::Refuted);
    }

    #[test]
    fn mfcq_witness_examples() {
        let w = mfcq_witness_inequality(&[f(&[-1])]).unwrap().unwrap();
        assert!(w.margin.unwrap().is_positive());
        assert!(mfcq_witness_inequality(&[f(&[1, 0]), f(&[-1, 0])])
            .unwrap()
            .is_none());
        assert!(mfcq_witness_inequality(&[]).unwrap().unwrap().is_vacuous());
    }

    #[test]
    fn lambda0_normalization() {
        let objective = f(&[1]);
        let active = vec![f(&[-1])];
        let cert = fj_inequality_direct(&objective, &active)
            .unwrap()
            .certificate()
            .cloned()
            .unwrap();
        let witness = mfcq_witness_inequality(&active).unwrap();
        let kkt =
            normalize_lambda0(&cert, &objective, &active, witness.as_ref()).unwrap();
        assert_eq!(kkt.lambda, vec![rat_int(1), rat_int(1)]);
        assert_eq!(kkt.normalization, Normalization::Lambda0One);
        assert!(kkt.flags.e);

        assert!(matches!(
            normalize_lambda0(&cert, &objective, &active, None),
            Err(EngineError::MfcqRequired)
        ));
    }

    #[test]
    fn lambda0_normalization_two_active() {
        let objective = f(&[1, 1]);
        let active = vec![f(&[-1, 0]), f(&[0, -1])];
        let cert = fj_inequality_direct(&objective, &active)
            .unwrap()
            .certificate()
            .cloned()
            .unwrap();
        let witness = mfcq_witness_inequality(&active).unwrap();
        let kkt =
            normalize_lambda0(&cert, &objective, &active, witness.as_ref()).unwrap();
        assert_eq!(kkt.lambda, vec![rat_int(1), rat_int(1), rat_int(1)]);
    }

    #[test]
    fn interior_lambda0_form() {
        let objective = f(&[0, 0]);
        let cert = fj_inequality_direct(&objective, &[])
            .unwrap()
            .certificate()
            .cloned()
            .unwrap();
        let witness = mfcq_witness_inequality(&[]).unwrap();
        let kkt = normalize_lambda0(&cert, &objective, &[], witness.as_ref()).unwrap();
        assert_eq!(kkt.lambda, vec![rat_int(1)]);
    }

    #[test]
    fn dual_path_agreement_on_small_cases() {
        let cases: Vec<(LinFunc, Vec<LinFunc>)> = vec![
            (f(&[1, 2]), vec![f(&[-1, 0]), f(&[0, -1])]),
            (f(&[1, 0]), vec![f(&[0, 1]), f(&[0, -1])]),
            (f(&[0, 0]), vec![f(&[1, 1])]),
            (f(&[2, -1]), vec![f(&[-2, 1])]),
            (f(&[1, 1]), vec![f(&[1, -1])]),
        ];
        for (objective, active) in cases {
            let direct = fj_inequality_direct(&objective, &active).unwrap();
            let staircase = fj_inequality_staircase(&objective, &active).unwrap();
            assert_eq!(
                direct.certificate().is_some(),
                staircase.certificate().is_some(),
                "paths disagree on {objective:?} / {active:?}"
            );
        }
    }
}
