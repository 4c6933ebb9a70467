//! Machine- and human-readable reports.
//!
//! Exact rationals are serialized as `p/q` strings; nearest floats ride
//! alongside, marked by the `_float` suffix, because JSON numbers cannot
//! carry exactness. Field order is fixed by the struct definitions and all
//! randomness is seeded, so identical inputs produce byte-identical output.

use crate::engine::{
    verify_certificate, CertifyOutcome, Certification, EngineError, FjCertificate, MfcqStatus,
    QualificationReport, Refutation, Tolerances,
};
use crate::expr::{fd_directional, frechet_probe, gradient, Expr, Point};
use crate::linalg::{ConeCertificate, StrictWitness};
use crate::problem::{ActiveSet, Problem};
use crate::rational::{format_rat, rat_to_f64, Rat};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct ConstraintSummary {
    pub label: String,
    pub expr: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemSummary {
    pub variables: Vec<String>,
    pub objective: String,
    pub inequalities: Vec<ConstraintSummary>,
    pub equalities: Vec<ConstraintSummary>,
}

impl ProblemSummary {
    pub fn new(problem: &Problem) -> Self {
        Self {
            variables: problem.variables.clone(),
            objective: problem.objective.to_string(),
            inequalities: problem
                .inequalities
                .iter()
                .map(|c| ConstraintSummary {
                    label: c.label.clone(),
                    expr: format!("{} >= 0", c.expr),
                })
                .collect(),
            equalities: problem
                .equalities
                .iter()
                .map(|c| ConstraintSummary {
                    label: c.label.clone(),
                    expr: format!("{} == 0", c.expr),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ActiveSetReport {
    /// 1-based constraint numbers of the saturated inequalities.
    pub indices: Vec<usize>,
    pub labels: Vec<String>,
    /// `g_i` values for every inequality, in declaration order.
    pub values: Vec<f64>,
    pub tolerance: f64,
}

impl ActiveSetReport {
    fn new(problem: &Problem, active_set: &ActiveSet) -> Self {
        Self {
            indices: active_set.active.iter().map(|i| i + 1).collect(),
            labels: active_set
                .active
                .iter()
                .map(|&i| problem.inequalities[i].label.clone())
                .collect(),
            values: active_set.values.clone(),
            tolerance: active_set.tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagsReport {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub direction: Vec<String>,
    pub direction_float: Vec<f64>,
    pub margin: Option<String>,
    pub vacuous: bool,
}

impl WitnessReport {
    fn new(witness: &StrictWitness) -> Self {
        Self {
            direction: witness.direction.iter().map(format_rat).collect(),
            direction_float: witness.direction.iter().map(rat_to_f64).collect(),
            margin: witness.margin.as_ref().map(format_rat),
            vacuous: witness.is_vacuous(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QualificationsReport {
    pub licq: bool,
    pub equality_rank: usize,
    /// "holds", "refuted", or "not-evaluated".
    pub mfcq: String,
    pub witness: Option<WitnessReport>,
    /// Which variant was checked: "inequality-only" or "equality-kernel".
    pub variant: String,
    pub note: Option<String>,
}

impl QualificationsReport {
    fn new(q: &QualificationReport) -> Self {
        let (mfcq, witness, note) = match &q.mfcq {
            MfcqStatus::Holds(w) => ("holds".to_string(), Some(WitnessReport::new(w)), None),
            MfcqStatus::Refuted => ("refuted".to_string(), None, None),
            MfcqStatus::NotEvaluated { reason } => {
                ("not-evaluated".to_string(), None, Some(reason.clone()))
            }
        };
        Self {
            licq: q.licq,
            equality_rank: q.equality_rank,
            mfcq,
            witness,
            variant: q.mfcq_variant.as_str().to_string(),
            note,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualsReport {
    /// Max-norm of the exact stationarity residual over the rationalized
    /// gradients (zero for every emitted certificate).
    pub stationarity_exact: String,
    /// Max-norm of the stationarity residual re-derived by central
    /// differences, independent of the dual-number path.
    pub stationarity_fd: f64,
    pub worst_inequality_violation: f64,
    pub worst_equality_violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub regime: String,
    pub normalization: String,
    pub lambda: Vec<String>,
    pub lambda_float: Vec<f64>,
    pub mu: Vec<String>,
    pub mu_float: Vec<f64>,
    pub flags: FlagsReport,
}

impl CertificateReport {
    fn new(c: &FjCertificate) -> Self {
        Self {
            regime: c.regime.as_str().to_string(),
            normalization: c.normalization.as_str().to_string(),
            lambda: c.lambda.iter().map(format_rat).collect(),
            lambda_float: c.lambda.iter().map(rat_to_f64).collect(),
            mu: c.mu.iter().map(format_rat).collect(),
            mu_float: c.mu.iter().map(rat_to_f64).collect(),
            flags: FlagsReport {
                a: c.flags.a,
                b: c.flags.b,
                c: c.flags.c,
                d: c.flags.d,
                e: c.flags.e,
            },
        }
    }
}

/// Top-level certification report. The primary (maxnorm-one) certificate's
/// fields sit at the top level; the `lambda0 = 1` form, when MFCQ holds,
/// appears under `kkt`.
#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub status: String,
    pub problem: ProblemSummary,
    pub point: BTreeMap<String, f64>,
    pub active_set: ActiveSetReport,
    pub regime: String,
    pub normalization: String,
    pub lambda: Vec<String>,
    pub lambda_float: Vec<f64>,
    pub mu: Vec<String>,
    pub mu_float: Vec<f64>,
    pub flags: FlagsReport,
    pub qualifications: QualificationsReport,
    pub residuals: ResidualsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn point_map(x: &Point) -> BTreeMap<String, f64> {
    x.names()
        .iter()
        .cloned()
        .zip(x.values().iter().copied())
        .collect()
}

fn exact_residual_maxnorm(certification: &Certification) -> Rat {
    let table = &certification.table;
    let cert = &certification.certificate;
    let mut lambda_engine = Vec::with_capacity(table.active.len() + 1);
    lambda_engine.push(cert.lambda[0].clone());
    for &i in &table.active_indices {
        lambda_engine.push(cert.lambda[i + 1].clone());
    }
    let residual = table.stationarity_residual(&lambda_engine, &cert.mu);
    crate::rational::max_norm(&residual)
}

/// Build the full report for a certification outcome, including the
/// independent finite-difference residual.
pub fn certify_report(
    problem: &Problem,
    x: &Point,
    outcome: &CertifyOutcome,
    tolerances: &Tolerances,
) -> Result<CertifyReport, EngineError> {
    match outcome {
        CertifyOutcome::Certified(c) => {
            let verification = verify_certificate(problem, x, &c.certificate, tolerances)?;
            Ok(CertifyReport {
                status: "certified".into(),
                problem: ProblemSummary::new(problem),
                point: point_map(x),
                active_set: ActiveSetReport::new(problem, &c.active_set),
                regime: c.certificate.regime.as_str().to_string(),
                normalization: c.certificate.normalization.as_str().to_string(),
                lambda: c.certificate.lambda.iter().map(format_rat).collect(),
                lambda_float: c.certificate.lambda.iter().map(rat_to_f64).collect(),
                mu: c.certificate.mu.iter().map(format_rat).collect(),
                mu_float: c.certificate.mu.iter().map(rat_to_f64).collect(),
                flags: FlagsReport {
                    a: c.certificate.flags.a,
                    b: c.certificate.flags.b,
                    c: c.certificate.flags.c,
                    d: c.certificate.flags.d,
                    e: c.certificate.flags.e,
                },
                qualifications: QualificationsReport::new(&c.qualification),
                residuals: ResidualsReport {
                    stationarity_exact: format_rat(&exact_residual_maxnorm(c)),
                    stationarity_fd: verification.stationarity_residual,
                    worst_inequality_violation: c.feasibility.worst_inequality_violation,
                    worst_equality_violation: c.feasibility.worst_equality_violation,
                },
                kkt: c.kkt_certificate.as_ref().map(CertificateReport::new),
                reason: None,
            })
        }
        CertifyOutcome::Refuted(r) => Ok(refuted_report(problem, x, r)),
    }
}

fn refuted_report(problem: &Problem, x: &Point, r: &Refutation) -> CertifyReport {
    CertifyReport {
        status: "refuted".into(),
        problem: ProblemSummary::new(problem),
        point: point_map(x),
        active_set: ActiveSetReport::new(problem, &r.active_set),
        regime: "none".into(),
        normalization: "none".into(),
        lambda: Vec::new(),
        lambda_float: Vec::new(),
        mu: Vec::new(),
        mu_float: Vec::new(),
        flags: FlagsReport {
            a: false,
            b: false,
            c: false,
            d: false,
            e: false,
        },
        qualifications: QualificationsReport::new(&r.qualification),
        residuals: ResidualsReport {
            stationarity_exact: "n/a".into(),
            stationarity_fd: f64::NAN,
            worst_inequality_violation: r.feasibility.worst_inequality_violation,
            worst_equality_violation: r.feasibility.worst_equality_violation,
        },
        kkt: None,
        reason: Some(r.reason.clone()),
    }
}

pub fn render_certify_text(report: &CertifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status: {}", report.status);
    if let Some(reason) = &report.reason {
        let _ = writeln!(out, "reason: {reason}");
    }
    let point: Vec<String> = report
        .point
        .iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect();
    let _ = writeln!(out, "point: {}", point.join(", "));
    let _ = writeln!(
        out,
        "active set: {}",
        if report.active_set.labels.is_empty() {
            "(empty)".to_string()
        } else {
            report.active_set.labels.join(", ")
        }
    );
    let _ = writeln!(
        out,
        "qualifications: licq = {} (rank {}), mfcq = {} [{}]",
        report.qualifications.licq,
        report.qualifications.equality_rank,
        report.qualifications.mfcq,
        report.qualifications.variant
    );
    if report.status == "certified" {
        let _ = writeln!(out, "regime: {}", report.regime);
        let _ = writeln!(out, "normalization: {}", report.normalization);
        let _ = writeln!(out, "lambda: [{}]", report.lambda.join(", "));
        let _ = writeln!(out, "mu: [{}]", report.mu.join(", "));
        let f = &report.flags;
        let _ = writeln!(
            out,
            "conclusions: a = {}, b = {}, c = {}, d = {}, e = {}",
            f.a, f.b, f.c, f.d, f.e
        );
        let _ = writeln!(
            out,
            "residuals: exact = {}, fd = {:.3e}",
            report.residuals.stationarity_exact, report.residuals.stationarity_fd
        );
        if let Some(kkt) = &report.kkt {
            let _ = writeln!(
                out,
                "kkt form: lambda = [{}], mu = [{}]",
                kkt.lambda.join(", "),
                kkt.mu.join(", ")
            );
        }
    }
    out
}

/// Qualification-only report (the `qualify` subcommand).
#[derive(Debug, Clone, Serialize)]
pub struct QualifyReport {
    pub problem: ProblemSummary,
    pub point: BTreeMap<String, f64>,
    pub active_set: ActiveSetReport,
    pub qualifications: QualificationsReport,
}

pub fn qualify_report(
    problem: &Problem,
    x: &Point,
    active_set: &ActiveSet,
    qualification: &QualificationReport,
) -> QualifyReport {
    QualifyReport {
        problem: ProblemSummary::new(problem),
        point: point_map(x),
        active_set: ActiveSetReport::new(problem, active_set),
        qualifications: QualificationsReport::new(qualification),
    }
}

pub fn render_qualify_text(report: &QualifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "active set: {}",
        if report.active_set.labels.is_empty() {
            "(empty)".to_string()
        } else {
            report.active_set.labels.join(", ")
        }
    );
    let _ = writeln!(
        out,
        "licq: {} (equality rank {})",
        report.qualifications.licq, report.qualifications.equality_rank
    );
    let _ = writeln!(
        out,
        "mfcq: {} [{}]",
        report.qualifications.mfcq, report.qualifications.variant
    );
    if let Some(w) = &report.qualifications.witness {
        if !w.vacuous {
            let _ = writeln!(
                out,
                "witness: [{}] with margin {}",
                w.direction.join(", "),
                w.margin.clone().unwrap_or_default()
            );
        }
    }
    out
}

/// Per-function row of the gradient check.
#[derive(Debug, Clone, Serialize)]
pub struct GradcheckRow {
    pub function: String,
    pub ad_gradient: Vec<f64>,
    pub fd_gradient: Vec<f64>,
    /// `max_k |ad_k - fd_k| / (1 + |fd_k|)`.
    pub max_discrepancy: f64,
    pub frechet_ratios: Vec<f64>,
    pub frechet_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckReport {
    pub problem: ProblemSummary,
    pub point: BTreeMap<String, f64>,
    pub fd_step: f64,
    pub tolerance: f64,
    pub probe_radii: Vec<f64>,
    pub rows: Vec<GradcheckRow>,
    pub max_discrepancy: f64,
    /// All AD/FD discrepancies within tolerance (the exit-code gate).
    pub pass: bool,
}

const GRADCHECK_FD_STEP: f64 = 1e-5;
const PROBE_RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];
const PROBE_SAMPLES: usize = 8;
const PROBE_TOLERANCE: f64 = 1e-3;

/// Compare dual-number gradients against central differences for the
/// objective and every constraint, and probe first-order behaviour at
/// shrinking radii. The probe verdicts are advisory; the pass flag gates on
/// the AD/FD comparison only.
pub fn gradcheck_report(
    problem: &Problem,
    x: &Point,
    seed: u64,
    tolerance: f64,
) -> Result<GradcheckReport, EngineError> {
    let mut rows = Vec::new();
    let mut functions: Vec<(String, &Expr)> = vec![("objective".into(), &problem.objective)];
    for c in problem.inequalities.iter().chain(&problem.equalities) {
        functions.push((c.label.clone(), &c.expr));
    }
    let n = problem.dim();
    let mut max_discrepancy = 0.0f64;
    for (name, expr) in functions {
        let ad = gradient(expr, x)?;
        let mut fd = Vec::with_capacity(n);
        let mut direction = vec![0.0; n];
        for k in 0..n {
            direction[k] = 1.0;
            fd.push(fd_directional(expr, x, &direction, GRADCHECK_FD_STEP)?);
            direction[k] = 0.0;
        }
        let discrepancy = ad
            .iter()
            .zip(&fd)
            .map(|(a, f)| (a - f).abs() / (1.0 + f.abs()))
            .fold(0.0f64, f64::max);
        max_discrepancy = max_discrepancy.max(discrepancy);
        let probe = frechet_probe(expr, x, &ad, &PROBE_RADII, PROBE_SAMPLES, seed, PROBE_TOLERANCE)?;
        rows.push(GradcheckRow {
            function: name,
            ad_gradient: ad,
            fd_gradient: fd,
            max_discrepancy: discrepancy,
            frechet_ratios: probe.worst_ratio,
            frechet_pass: probe.pass,
        });
    }
    Ok(GradcheckReport {
        problem: ProblemSummary::new(problem),
        point: point_map(x),
        fd_step: GRADCHECK_FD_STEP,
        tolerance,
        probe_radii: PROBE_RADII.to_vec(),
        max_discrepancy,
        pass: max_discrepancy <= tolerance,
        rows,
    })
}

pub fn render_gradcheck_text(report: &GradcheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "gradient check (fd step {:.0e}, tolerance {:.1e})",
        report.fd_step, report.tolerance
    );
    for row in &report.rows {
        let _ = writeln!(
            out,
            "  {:<12} max discrepancy {:.3e}  probe {}",
            row.function,
            row.max_discrepancy,
            if row.frechet_pass { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "overall: {} (max discrepancy {:.3e})",
        if report.pass { "pass" } else { "FAIL" },
        report.max_discrepancy
    );
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FarkasReport {
    /// "combination" or "separator".
    pub variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separator: Option<Vec<String>>,
}

pub fn farkas_report(certificate: &ConeCertificate) -> FarkasReport {
    match certificate {
        ConeCertificate::Combination { lambda } => FarkasReport {
            variant: "combination".into(),
            lambda: Some(lambda.iter().map(format_rat).collect()),
            separator: None,
        },
        ConeCertificate::Separator { x } => FarkasReport {
            variant: "separator".into(),
            lambda: None,
            separator: Some(x.iter().map(format_rat).collect()),
        },
    }
}

pub fn render_farkas_text(report: &FarkasReport) -> String {
    match report.variant.as_str() {
        "combination" => format!(
            "combination: {}\n",
            report.lambda.as_ref().unwrap().join(", ")
        ),
        _ => format!(
            "separator: {}\n",
            report.separator.as_ref().unwrap().join(", ")
        ),
    }
}
