//! Exact rational linear algebra.
//!
//! Everything here runs on arbitrary-precision rationals: cone membership is
//! an exact alternative (a nonnegative combination or a strict separator,
//! never both), strict feasibility of open polyhedral cones is decided by an
//! exact LP, and kernels/ranks/solves come from fraction-free Gauss–Jordan.
//! A Fourier–Motzkin elimination oracle provides an independent brute-force
//! route for cross-checking at small dimension.

mod cone;
mod fourier_motzkin;
mod gauss;
pub(crate) mod simplex;

pub use cone::{
    combination_search, farkas_decide, separator_search, strict_feasibility, ConeCertificate,
    StrictWitness,
};
pub use fourier_motzkin::{fm_mixed_empty, fm_oracle, fm_oracle_strict, FM_MAX_DIM};
pub use gauss::{nullspace_basis, rank_independent, solve_square, NullspaceBasis};

use crate::rational::Rat;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular (rank {rank} of {size})")]
    SingularMatrix { rank: usize, size: usize },
    #[error("simplex pivot limit exceeded ({limit} iterations)")]
    PivotLimitExceeded { limit: u64 },
    #[error("dimension {dim} exceeds the elimination guard ({max})")]
    DimensionGuard { dim: usize, max: usize },
    #[error("input cannot be represented exactly: {0}")]
    NotRepresentable(String),
}

/// A row functional on `Q^n`, i.e. an element of the dual space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinFunc {
    coeffs: Vec<Rat>,
}

impl LinFunc {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: vec![Rat::zero(); dim],
        }
    }

    /// Exact conversion from floats; fails on NaN or infinities.
    pub fn from_floats(values: &[f64]) -> Result<Self, LinalgError> {
        values
            .iter()
            .map(|&x| {
                crate::rational::rat_from_f64(x)
                    .ok_or_else(|| LinalgError::NotRepresentable(format!("non-finite value {x}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&x| crate::rational::rat_int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Pairing with a vector: `sum_k coeffs[k] * x[k]`.
    pub fn apply(&self, x: &[Rat]) -> Rat {
        debug_assert_eq!(self.dim(), x.len());
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    pub fn scaled(&self, factor: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn negated(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// `self + factor * other`, exact.
    pub fn add_scaled(&self, other: &Self, factor: &Rat) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * factor)
                .collect(),
        )
    }
}

/// All functionals must share dimension `n >= 1`; returns that dimension.
pub(crate) fn common_dimension(rows: &[LinFunc], extra: Option<&LinFunc>) -> Result<usize, LinalgError> {
    let dim = match (rows.first(), extra) {
        (Some(r), _) => r.dim(),
        (None, Some(a)) => a.dim(),
        (None, None) => return Err(LinalgError::DimensionMismatch { expected: 1, got: 0 }),
    };
    for r in rows {
        if r.dim() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: r.dim(),
            });
        }
    }
    if let Some(a) = extra {
        if a.dim() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                got: a.dim(),
            });
        }
    }
    if dim == 0 {
        return Err(LinalgError::DimensionMismatch { expected: 1, got: 0 });
    }
    Ok(dim)
}
