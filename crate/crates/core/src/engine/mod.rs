//! Fritz John / KKT multiplier engine.
//!
//! The inequality-only problem is solved by two independent algorithms (a
//! direct exact LP on the multipliers, and a staircase construction that
//! walks the nested open cones `A_k`) whose answers are cross-checked
//! on every run. Equality constraints are removed by restricting to the
//! kernel of their gradients; the equality multipliers are then recovered by
//! an exact square solve on the pivot coordinates, so the full stationarity
//! identity holds with zero residual.

mod certify;
mod inequality;
mod reduction;

pub use certify::{
    full_certify, qualification, verify_certificate, Certification, CertifyOutcome, Refutation,
    Tolerances, VerificationReport,
};
pub use inequality::{
    fj_inequality_direct, fj_inequality_staircase, mfcq_witness_inequality, normalize_lambda0,
    FjOutcome,
};
pub use reduction::{
    dependent_equality_mu, licq_check, mfcq_witness_equality, recover_mu, reduce_equalities,
    ReducedProblem,
};

use crate::expr::{gradient, ExprError, Point};
use crate::linalg::{LinFunc, LinalgError, StrictWitness};
use crate::problem::{ActiveSet, Problem, ProblemError};
use crate::rational::Rat;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("MFCQ witness required but not established")]
    MfcqRequired,
    #[error("equality gradients are linearly dependent (rank {rank} of {count})")]
    LicqViolated { rank: usize, count: usize },
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

/// Rationalized gradients of the objective, the active inequalities, and
/// the equalities at a candidate point.
#[derive(Debug, Clone)]
pub struct GradientTable {
    dim: usize,
    pub objective: LinFunc,
    pub active: Vec<LinFunc>,
    /// Original 0-based inequality indices behind `active`, in order.
    pub active_indices: Vec<usize>,
    pub equalities: Vec<LinFunc>,
}

impl GradientTable {
    pub fn new(
        objective: LinFunc,
        active: Vec<LinFunc>,
        equalities: Vec<LinFunc>,
    ) -> Result<Self, EngineError> {
        let indices = (0..active.len()).collect();
        Self::with_indices(objective, active, indices, equalities)
    }

    pub fn with_indices(
        objective: LinFunc,
        active: Vec<LinFunc>,
        active_indices: Vec<usize>,
        equalities: Vec<LinFunc>,
    ) -> Result<Self, EngineError> {
        let dim = objective.dim();
        if dim == 0 {
            return Err(LinalgError::DimensionMismatch {
                expected: 1,
                got: 0,
            }
            .into());
        }
        if active_indices.len() != active.len() {
            return Err(EngineError::Malformed(
                "active index bookkeeping does not match the gradient count".into(),
            ));
        }
        for g in active.iter().chain(&equalities) {
            if g.dim() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                }
                .into());
            }
        }
        Ok(Self {
            dim,
            objective,
            active,
            active_indices,
            equalities,
        })
    }

    /// Differentiate the problem at `x` (forward-mode, floats) and
    /// rationalize the results exactly.
    pub fn from_problem(
        problem: &Problem,
        x: &Point,
        active_set: &ActiveSet,
    ) -> Result<Self, EngineError> {
        let objective = LinFunc::from_floats(&gradient(&problem.objective, x)?)?;
        let mut active = Vec::with_capacity(active_set.active.len());
        for &i in &active_set.active {
            active.push(LinFunc::from_floats(&gradient(
                &problem.inequalities[i].expr,
                x,
            )?)?);
        }
        let mut equalities = Vec::with_capacity(problem.equalities.len());
        for c in &problem.equalities {
            equalities.push(LinFunc::from_floats(&gradient(&c.expr, x)?)?);
        }
        Self::with_indices(objective, active, active_set.active.clone(), equalities)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exact coefficients of the weighted gradient sum
    /// `lambda_0 * objective + sum(lambda_i * active_i) + sum(mu_j * equality_j)`;
    /// `lambda` lists the objective multiplier first, then one entry per
    /// active gradient.
    pub fn stationarity_residual(&self, lambda: &[Rat], mu: &[Rat]) -> Vec<Rat> {
        debug_assert_eq!(lambda.len(), self.active.len() + 1);
        debug_assert_eq!(mu.len(), self.equalities.len());
        let mut total = self.objective.scaled(&lambda[0]);
        for (l, g) in lambda[1..].iter().zip(&self.active) {
            total = total.add_scaled(g, l);
        }
        for (m, h) in mu.iter().zip(&self.equalities) {
            total = total.add_scaled(h, m);
        }
        total.coeffs().to_vec()
    }
}

/// Which construction produced the multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Equality gradients dependent; all inequality multipliers vanish.
    DependentEqualities,
    /// No saturated inequality: stationarity of the objective alone.
    Interior,
    /// The innermost cone is empty, i.e. the last saturated gradient is zero.
    Degenerate,
    /// Minimal-index cone construction with a Farkas combination step.
    Staircase,
    /// Direct exact LP on the multipliers.
    Direct,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::DependentEqualities => "dependent-equalities",
            Regime::Interior => "interior",
            Regime::Degenerate => "degenerate",
            Regime::Staircase => "staircase",
            Regime::Direct => "direct",
        }
    }
}

/// Scale convention of a certificate's multiplier vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Multipliers sum to one (direct LP output).
    SumOne,
    /// Largest-magnitude entry has magnitude one, made `+1` when it is a lambda.
    MaxNormOne,
    /// Objective multiplier pinned to one (KKT form, needs MFCQ).
    Lambda0One,
    /// Raw construction output (staircase assembly).
    Unnormalized,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::SumOne => "sum-one",
            Normalization::MaxNormOne => "maxnorm-one",
            Normalization::Lambda0One => "lambda0-one",
            Normalization::Unnormalized => "unnormalized",
        }
    }
}

/// Which of the certificate conclusions hold for the emitted multipliers:
/// (a) some multiplier is nonzero, (b) complementary slackness, (c) exact
/// stationarity, (d) the lambda part alone is nonzero, (e) lambda0 is one
/// (or can be made one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConclusionFlags {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
}

/// Fritz John multipliers plus bookkeeping.
///
/// At the engine level `lambda` has one entry per gradient handed in
/// (objective first, then the active inequalities). [`full_certify`] expands
/// it to length `p + 1` over all of the problem's inequalities, with zeros
/// on the inactive ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FjCertificate {
    pub lambda: Vec<Rat>,
    pub mu: Vec<Rat>,
    pub normalization: Normalization,
    pub regime: Regime,
    pub flags: ConclusionFlags,
}

impl FjCertificate {
    /// Exact conclusions against a gradient table whose layout matches
    /// `lambda`/`mu`. Complementary slackness is structural here: inactive
    /// inequalities are simply not in the table.
    pub(crate) fn table_flags(lambda: &[Rat], mu: &[Rat], residual: &[Rat]) -> ConclusionFlags {
        let lambda_nonzero = lambda.iter().any(|l| !l.is_zero());
        let any_nonzero = lambda_nonzero || mu.iter().any(|m| !m.is_zero());
        let stationary = residual.iter().all(Rat::is_zero);
        ConclusionFlags {
            a: any_nonzero,
            b: true,
            c: stationary,
            d: lambda_nonzero,
            e: !lambda.is_empty() && lambda[0].is_one(),
        }
    }

    /// Positive rescaling to `max |entry| = 1`, preferring a lambda entry as
    /// the one that becomes `+1`. Nonnegativity of lambda and every exact
    /// identity are preserved (the scale factor is positive).
    pub fn normalized_maxnorm(mut self) -> Self {
        let lambda_max = self
            .lambda
            .iter()
            .map(|l| l.abs())
            .max()
            .unwrap_or_else(Rat::zero);
        let mu_max = self
            .mu
            .iter()
            .map(|m| m.abs())
            .max()
            .unwrap_or_else(Rat::zero);
        let scale = if lambda_max.is_positive() && lambda_max >= mu_max {
            lambda_max
        } else if mu_max.is_positive() {
            mu_max
        } else {
            return self; // all zero; nothing to scale
        };
        for l in self.lambda.iter_mut() {
            *l /= &scale;
        }
        for m in self.mu.iter_mut() {
            *m /= &scale;
        }
        self.normalization = Normalization::MaxNormOne;
        self.flags.e = !self.lambda.is_empty() && self.lambda[0].is_one();
        self
    }
}

/// Constraint-qualification findings at the candidate point.
#[derive(Debug, Clone)]
pub struct QualificationReport {
    /// Equality gradients linearly independent (vacuously true when `q = 0`).
    pub licq: bool,
    pub equality_rank: usize,
    pub mfcq: MfcqStatus,
    /// Which variant was checked: positivity over the whole space
    /// (inequality-only problems) or over the equality kernel.
    pub mfcq_variant: MfcqVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfcqVariant {
    InequalityOnly,
    EqualityKernel,
}

impl MfcqVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            MfcqVariant::InequalityOnly => "inequality-only",
            MfcqVariant::EqualityKernel => "equality-kernel",
        }
    }
}

#[derive(Debug, Clone)]
pub enum MfcqStatus {
    /// Witness found; a vacuous witness means there was nothing to check.
    Holds(StrictWitness),
    /// No strict direction exists, definitively.
    Refuted,
    /// Not checked (LICQ failed first).
    NotEvaluated { reason: String },
}

impl MfcqStatus {
    pub fn holds(&self) -> bool {
        matches!(self, MfcqStatus::Holds(_))
    }

    pub fn witness(&self) -> Option<&StrictWitness> {
        match self {
            MfcqStatus::Holds(w) => Some(w),
            _ => None,
        }
    }
}
