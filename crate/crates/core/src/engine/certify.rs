//! End-to-end certification pipeline and the independent verifier.

use super::{
    dependent_equality_mu, fj_inequality_direct, fj_inequality_staircase, mfcq_witness_equality,
    mfcq_witness_inequality, normalize_lambda0, recover_mu, reduce_equalities, ConclusionFlags,
    EngineError, FjCertificate, FjOutcome, GradientTable, MfcqStatus, MfcqVariant, Normalization,
    QualificationReport, Regime,
};
use crate::expr::{fd_directional, Point};
use crate::problem::{check_feasibility, detect_active_set, ActiveSet, Problem, ProblemError};
use crate::rational::{rat_to_f64, Rat};
use num_traits::{One, Signed, Zero};

/// Tolerance bands of the numeric boundary layer. Everything downstream of
/// gradient rationalization is exact and needs no tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Active-set band: `|g_i(x)| <= active` marks constraint `i` saturated.
    pub active: f64,
    /// Feasibility band on constraint residuals.
    pub feasibility: f64,
    /// Stationarity band for float-level (finite-difference) verification.
    pub stationarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        // Active-set misclassification is the dominant failure mode, so the
        // active band is wider than the feasibility band.
        Self {
            active: 1e-8,
            feasibility: 1e-9,
            stationarity: 1e-6,
        }
    }
}

/// Result of a successful certification.
#[derive(Debug, Clone)]
pub struct Certification {
    pub feasibility: crate::problem::FeasibilityReport,
    pub active_set: ActiveSet,
    pub table: GradientTable,
    pub qualification: QualificationReport,
    /// Primary certificate, maxnorm-one normalized, `lambda` over all
    /// `p + 1` positions and `mu` over all `q`.
    pub certificate: FjCertificate,
    /// The `lambda0 = 1` (KKT) form, present exactly when MFCQ holds.
    pub kkt_certificate: Option<FjCertificate>,
}

/// A definitive "the first-order necessary condition fails here".
#[derive(Debug, Clone)]
pub struct Refutation {
    pub feasibility: crate::problem::FeasibilityReport,
    pub active_set: ActiveSet,
    pub qualification: QualificationReport,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    Certified(Box<Certification>),
    Refuted(Box<Refutation>),
}

impl CertifyOutcome {
    pub fn certification(&self) -> Option<&Certification> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Refuted(_) => None,
        }
    }
}

/// LICQ and MFCQ status of a gradient table. With equalities present the
/// MFCQ variant searches inside their kernel (and is not evaluated at all
/// when the equality gradients are dependent).
pub fn qualification(table: &GradientTable) -> Result<QualificationReport, EngineError> {
    let q = table.equalities.len();
    let (licq, equality_rank) = super::licq_check(&table.equalities)?;
    let (mfcq, mfcq_variant) = if q == 0 {
        let status = match mfcq_witness_inequality(&table.active)? {
            Some(w) => MfcqStatus::Holds(w),
            None => MfcqStatus::Refuted,
        };
        (status, MfcqVariant::InequalityOnly)
    } else if !licq {
        (
            MfcqStatus::NotEvaluated {
                reason: "equality gradients are linearly dependent".into(),
            },
            MfcqVariant::EqualityKernel,
        )
    } else {
        let status = match mfcq_witness_equality(table)? {
            Some(w) => MfcqStatus::Holds(w),
            None => MfcqStatus::Refuted,
        };
        (status, MfcqVariant::EqualityKernel)
    };
    Ok(QualificationReport {
        licq,
        equality_rank,
        mfcq,
        mfcq_variant,
    })
}

/// Expand an engine-level `lambda` (objective + active constraints) to the
/// full `p + 1` vector with zeros on inactive inequalities.
fn expand_lambda(table: &GradientTable, lambda: &[Rat], total_inequalities: usize) -> Vec<Rat> {
    let mut full = vec![Rat::zero(); total_inequalities + 1];
    full[0] = lambda[0].clone();
    for (slot, original) in table.active_indices.iter().enumerate() {
        full[original + 1] = lambda[slot + 1].clone();
    }
    full
}

fn problem_level_certificate(
    table: &GradientTable,
    lambda_engine: &[Rat],
    mu: Vec<Rat>,
    normalization: Normalization,
    regime: Regime,
    total_inequalities: usize,
) -> Result<FjCertificate, EngineError> {
    let residual = table.stationarity_residual(lambda_engine, &mu);
    if residual.iter().any(|r| !r.is_zero()) {
        return Err(EngineError::CrossCheck(
            "assembled certificate has a nonzero exact stationarity residual".into(),
        ));
    }
    let lambda = expand_lambda(table, lambda_engine, total_inequalities);
    let lambda_nonzero = lambda.iter().any(|l| !l.is_zero());
    let flags = ConclusionFlags {
        a: lambda_nonzero || mu.iter().any(|m| !m.is_zero()),
        b: true, // inactive multipliers are zero by construction
        c: true, // checked exactly above
        d: lambda_nonzero,
        e: lambda[0].is_one(),
    };
    Ok(FjCertificate {
        lambda,
        mu,
        normalization,
        regime,
        flags,
    })
}

/// Full pipeline: feasibility, active set, gradients, qualifications, both
/// multiplier algorithms with cross-check, equality-multiplier recovery,
/// and normalization.
pub fn full_certify(
    problem: &Problem,
    x: &Point,
    tolerances: &Tolerances,
) -> Result<CertifyOutcome, EngineError> {
    if x.names() != problem.variables {
        return Err(EngineError::Malformed(
            "point variables do not match the problem's variable list".into(),
        ));
    }
    let feasibility = check_feasibility(problem, x, tolerances.feasibility)?;
    if !feasibility.feasible {
        return Err(ProblemError::Infeasible(
            feasibility.worst_inequality_violation,
            feasibility.worst_equality_violation,
        )
        .into());
    }
    let active_set = detect_active_set(problem, x, tolerances.active, tolerances.feasibility)?;
    let table = GradientTable::from_problem(problem, x, &active_set)?;
    let p = problem.inequalities.len();
    let q = table.equalities.len();

    let qualification = qualification(&table)?;

    // Dependent equality gradients: a multiplier vector supported on the
    // equalities alone already annihilates everything.
    if q > 0 && !qualification.licq {
        let mu = dependent_equality_mu(&table.equalities)?;
        let lambda_engine = vec![Rat::zero(); table.active.len() + 1];
        let certificate = problem_level_certificate(
            &table,
            &lambda_engine,
            mu,
            Normalization::Unnormalized,
            Regime::DependentEqualities,
            p,
        )?
        .normalized_maxnorm();
        return Ok(CertifyOutcome::Certified(Box::new(Certification {
            feasibility,
            active_set,
            table,
            qualification,
            certificate,
            kkt_certificate: None,
        })));
    }

    // Under LICQ, restrict to the kernel of the equality gradients. For
    // q = 0 the reduction is the identity.
    let reduced = reduce_equalities(&table)?;
    let mfcq = qualification.mfcq.witness().cloned();

    // Zero-dimensional reduction (q = n): stationarity is entirely carried
    // by the equality multipliers; take lambda0 = 1 and solve for mu.
    if reduced.kernel_basis.is_empty() {
        let mut lambda_engine = vec![Rat::zero(); table.active.len() + 1];
        lambda_engine[0] = Rat::one();
        let mu = recover_mu(&lambda_engine, &table, &reduced)?;
        let base = problem_level_certificate(
            &table,
            &lambda_engine,
            mu,
            Normalization::Lambda0One,
            Regime::Direct,
            p,
        )?;
        let kkt_certificate = mfcq.as_ref().map(|_| base.clone());
        let mut certificate = base.normalized_maxnorm();
        certificate.flags.e = certificate.flags.e || kkt_certificate.is_some();
        return Ok(CertifyOutcome::Certified(Box::new(Certification {
            feasibility,
            active_set,
            table,
            qualification,
            certificate,
            kkt_certificate,
        })));
    }

    // Both inequality-only algorithms run on the (possibly reduced)
    // gradients and must agree on existence.
    let direct = fj_inequality_direct(&reduced.objective, &reduced.active)?;
    let staircase = fj_inequality_staircase(&reduced.objective, &reduced.active)?;
    let engine_cert = match (&direct, &staircase) {
        (FjOutcome::Certificate(d), FjOutcome::Certificate(_)) => d.clone(),
        (FjOutcome::Refuted, FjOutcome::Refuted) => {
            return Ok(CertifyOutcome::Refuted(Box::new(Refutation {
                feasibility,
                active_set,
                qualification,
                reason: "necessary condition fails at the candidate point: no nonzero \
                         nonnegative multipliers annihilate the gradients"
                    .into(),
            })));
        }
        (d, s) => {
            return Err(EngineError::CrossCheck(format!(
                "direct and staircase algorithms disagree on certificate existence \
                 (direct: {}, staircase: {})",
                if d.certificate().is_some() { "certificate" } else { "refuted" },
                if s.certificate().is_some() { "certificate" } else { "refuted" },
            )));
        }
    };

    let mu = recover_mu(&engine_cert.lambda, &table, &reduced)?;
    let base = problem_level_certificate(
        &table,
        &engine_cert.lambda,
        mu,
        engine_cert.normalization,
        engine_cert.regime,
        p,
    )?;

    // KKT form under MFCQ: recompute with lambda0 pinned to one.
    let kkt_certificate = match &mfcq {
        Some(witness) => {
            let kkt_engine = normalize_lambda0(
                &engine_cert,
                &reduced.objective,
                &reduced.active,
                Some(witness),
            )?;
            let kkt_mu = recover_mu(&kkt_engine.lambda, &table, &reduced)?;
            Some(problem_level_certificate(
                &table,
                &kkt_engine.lambda,
                kkt_mu,
                Normalization::Lambda0One,
                kkt_engine.regime,
                p,
            )?)
        }
        None => None,
    };

    let mut certificate = base.normalized_maxnorm();
    certificate.flags.e = certificate.flags.e || kkt_certificate.is_some();

    Ok(CertifyOutcome::Certified(Box::new(Certification {
        feasibility,
        active_set,
        table,
        qualification,
        certificate,
        kkt_certificate,
    })))
}

/// Independent verification report for conclusions (a), (b), (c).
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// All inequality multipliers are nonnegative (part of well-formedness).
    pub nonnegative: bool,
    /// (a) some multiplier is nonzero.
    pub a: bool,
    /// (b) multipliers vanish on inactive inequalities.
    pub b: bool,
    /// (c) finite-difference stationarity residual within tolerance.
    pub c: bool,
    /// Max-norm of the float stationarity residual.
    pub stationarity_residual: f64,
    /// Inactive inequalities carrying a nonzero multiplier (0-based).
    pub slackness_violations: Vec<usize>,
    pub pass: bool,
}

/// Re-derive every gradient by central differences (independent of the
/// dual-number path) and check the certificate's conclusions numerically;
/// (a) and (b) are exact checks on the multipliers themselves.
pub fn verify_certificate(
    problem: &Problem,
    x: &Point,
    certificate: &FjCertificate,
    tolerances: &Tolerances,
) -> Result<VerificationReport, EngineError> {
    let p = problem.inequalities.len();
    let q = problem.equalities.len();
    if certificate.lambda.len() != p + 1 {
        return Err(EngineError::Malformed(format!(
            "lambda has {} entries, expected {}",
            certificate.lambda.len(),
            p + 1
        )));
    }
    if certificate.mu.len() != q {
        return Err(EngineError::Malformed(format!(
            "mu has {} entries, expected {}",
            certificate.mu.len(),
            q
        )));
    }

    let nonnegative = certificate.lambda.iter().all(|l| !l.is_negative());
    let a = certificate.lambda.iter().any(|l| !l.is_zero())
        || certificate.mu.iter().any(|m| !m.is_zero());

    // (b): complementary slackness against the active band.
    let mut slackness_violations = Vec::new();
    for (i, constraint) in problem.inequalities.iter().enumerate() {
        let value = crate::expr::evaluate(&constraint.expr, x)?;
        if value.abs() > tolerances.active && !certificate.lambda[i + 1].is_zero() {
            slackness_violations.push(i);
        }
    }
    let b = slackness_violations.is_empty();

    // (c): stationarity with finite-difference gradients.
    let n = problem.dim();
    let fd_gradient = |expr: &crate::expr::Expr| -> Result<Vec<f64>, EngineError> {
        let mut direction = vec![0.0; n];
        let mut grad = Vec::with_capacity(n);
        for k in 0..n {
            direction[k] = 1.0;
            grad.push(fd_directional(expr, x, &direction, 1e-5)?);
            direction[k] = 0.0;
        }
        Ok(grad)
    };

    let mut residual = vec![0.0f64; n];
    let add_scaled = |residual: &mut Vec<f64>, grad: &[f64], factor: f64| {
        for (r, g) in residual.iter_mut().zip(grad) {
            *r += factor * g;
        }
    };
    add_scaled(
        &mut residual,
        &fd_gradient(&problem.objective)?,
        rat_to_f64(&certificate.lambda[0]),
    );
    for (i, constraint) in problem.inequalities.iter().enumerate() {
        let factor = rat_to_f64(&certificate.lambda[i + 1]);
        if factor != 0.0 {
            add_scaled(&mut residual, &fd_gradient(&constraint.expr)?, factor);
        }
    }
    for (j, constraint) in problem.equalities.iter().enumerate() {
        let factor = rat_to_f64(&certificate.mu[j]);
        if factor != 0.0 {
            add_scaled(&mut residual, &fd_gradient(&constraint.expr)?, factor);
        }
    }
    let stationarity_residual = residual.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let c = stationarity_residual <= tolerances.stationarity;

    Ok(VerificationReport {
        nonnegative,
        a,
        b,
        c,
        stationarity_residual,
        slackness_violations,
        pass: nonnegative && a && b && c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::load_problem;
    use crate::rational::{rat, rat_int};

    const CIRCLE: &str = "\
vars: x, y
maximize: x + y
h1: x^2 + y^2 - 2 == 0
point: x = 1, y = 1
";

    fn certify(text: &str) -> (Problem, Point, CertifyOutcome) {
        let (problem, point) = load_problem(text).unwrap();
        let x = point.expect("point line");
        let outcome = full_certify(&problem, &x, &Tolerances::default()).unwrap();
        (problem, x, outcome)
    }

    #[test]
    fn circle_yields_kkt_with_mu_minus_half() {
        let (problem, x, outcome) = certify(CIRCLE);
        let cert = outcome.certification().expect("certified");
        assert_eq!(cert.certificate.lambda, vec![rat_int(1)]);
        assert_eq!(cert.certificate.mu, vec![rat(-1, 2)]);
        assert!(cert.qualification.licq);
        assert!(cert.qualification.mfcq.holds());
        let flags = cert.certificate.flags;
        assert!(flags.a && flags.b && flags.c && flags.d && flags.e);
        let kkt = cert.kkt_certificate.as_ref().expect("kkt form");
        assert_eq!(kkt.lambda[0], rat_int(1));

        let report =
            verify_certificate(&problem, &x, &cert.certificate, &Tolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn single_inequality_at_the_boundary() {
        let text = "vars: x\nmaximize: x\ng1: 1 - x >= 0\npoint: x = 1\n";
        let (_, _, outcome) = certify(text);
        let cert = outcome.certification().expect("certified");
        // Under MFCQ (witness -1) the lambda0 = 1 form is (1, 1).
        let kkt = cert.kkt_certificate.as_ref().expect("kkt");
        assert_eq!(kkt.lambda, vec![rat_int(1), rat_int(1)]);
        assert_eq!(cert.certificate.lambda, vec![rat_int(1), rat_int(1)]);
        assert!(cert.certificate.flags.e);
    }

    #[test]
    fn interior_nonstationary_point_is_refuted() {
        let text = "vars: x\nmaximize: x\ng1: x >= 0\npoint: x = 1\n";
        let (_, _, outcome) = certify(text);
        match outcome {
            CertifyOutcome::Refuted(r) => {
                assert!(r.reason.contains("necessary condition fails"));
                assert!(r.qualification.mfcq.holds(), "vacuous MFCQ");
            }
            CertifyOutcome::Certified(_) => panic!("expected refutation"),
        }
    }

    #[test]
    fn dependent_equalities_regime() {
        let text = "vars: x\nmaximize: x\nh1: x == 0\nh2: 2*x == 0\npoint: x = 0\n";
        let (_, _, outcome) = certify(text);
        let cert = outcome.certification().expect("certified");
        assert_eq!(cert.certificate.regime, Regime::DependentEqualities);
        assert!(cert.certificate.lambda.iter().all(|l| l.is_zero()));
        // mu proportional to (2, -1).
        let mu = &cert.certificate.mu;
        assert!(!mu[0].is_zero());
        assert_eq!(&mu[0] * rat_int(-1), &mu[1] * rat_int(2));
        assert!(!cert.certificate.flags.d);
        assert!(!cert.qualification.licq);
    }

    #[test]
    fn inactive_inequalities_get_zero_multipliers() {
        let text = "vars: x, y\nmaximize: x\ng1: 1 - x >= 0\ng2: 2 - y >= 0\npoint: x = 1, y = 1\n";
        let (problem, x, outcome) = certify(text);
        let cert = outcome.certification().expect("certified");
        // g1 is saturated, g2 sits at value 1; its multiplier must be zero.
        assert_eq!(cert.active_set.active, vec![0]);
        assert_eq!(cert.certificate.lambda.len(), 3);
        assert!(cert.certificate.lambda[2].is_zero());
        assert!(!cert.certificate.lambda[1].is_zero());
        let report =
            verify_certificate(&problem, &x, &cert.certificate, &Tolerances::default()).unwrap();
        assert!(report.pass, "{report:?}");

        // A nonzero multiplier on the inactive constraint must fail (b).
        let mut tampered = cert.certificate.clone();
        tampered.lambda[2] = rat_int(1);
        let report = verify_certificate(&problem, &x, &tampered, &Tolerances::default()).unwrap();
        assert!(!report.b);
        assert_eq!(report.slackness_violations, vec![1]);
    }

    #[test]
    fn square_full_rank_equalities() {
        let text = "vars: x, y\nmaximize: x + y\nh1: x - 1 == 0\nh2: y - 2 == 0\npoint: x = 1, y = 2\n";
        let (problem, x, outcome) = certify(text);
        let cert = outcome.certification().expect("certified");
        assert_eq!(cert.certificate.lambda[0], rat_int(1));
        assert_eq!(cert.certificate.mu, vec![rat_int(-1), rat_int(-1)]);
        let report =
            verify_certificate(&problem, &x, &cert.certificate, &Tolerances::default()).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn infeasible_point_aborts() {
        let (problem, _) = load_problem(CIRCLE).unwrap();
        let x = Point::new([("x", 2.0), ("y", 0.0)]).unwrap();
        assert!(matches!(
            full_certify(&problem, &x, &Tolerances::default()),
            Err(EngineError::Problem(ProblemError::Infeasible(..)))
        ));
    }

    #[test]
    fn verifier_flags_a_flipped_mu() {
        let (problem, x, outcome) = certify(CIRCLE);
        let cert = outcome.certification().unwrap();
        let mut tampered = cert.certificate.clone();
        tampered.mu[0] = rat(1, 2);
        let report = verify_certificate(&problem, &x, &tampered, &Tolerances::default()).unwrap();
        assert!(!report.c);
        assert!((report.stationarity_residual - 2.0).abs() < 1e-6);
        assert!(!report.pass);
    }

    #[test]
    fn verifier_flags_all_zero_multipliers() {
        let (problem, x, _) = certify(CIRCLE);
        let zero = FjCertificate {
            lambda: vec![rat_int(0)],
            mu: vec![rat_int(0)],
            normalization: Normalization::Unnormalized,
            regime: Regime::Direct,
            flags: ConclusionFlags::default(),
        };
        let report = verify_certificate(&problem, &x, &zero, &Tolerances::default()).unwrap();
        assert!(!report.a);
        assert!(!report.pass);
    }

    #[test]
    fn verifier_flags_negative_lambda() {
        let text = "vars: x\nmaximize: x\ng1: 1 - x >= 0\npoint: x = 1\n";
        let (problem, x, outcome) = certify(text);
        let mut tampered = outcome.certification().unwrap().certificate.clone();
        tampered.lambda[1] = -tampered.lambda[1].clone();
        let report = verify_certificate(&problem, &x, &tampered, &Tolerances::default()).unwrap();
        assert!(!report.nonnegative);
        assert!(!report.pass);
    }

    #[test]
    fn verifier_rejects_wrong_shape() {
        let (problem, x, _) = certify(CIRCLE);
        let bad = FjCertificate {
            lambda: vec![rat_int(1), rat_int(1)],
            mu: vec![],
            normalization: Normalization::Unnormalized,
            regime: Regime::Direct,
            flags: ConclusionFlags::default(),
        };
        assert!(matches!(
            verify_certificate(&problem, &x, &bad, &Tolerances::default()),
            Err(EngineError::Malformed(_))
        ));
    }
}
