//! First-order necessary-optimality certificates for finite-dimensional
//! maximization problems with inequality and equality constraints.
//!
//! The crate is organized around a pipeline:
//!
//! 1. [`expr`]: parse, evaluate, and differentiate scalar expressions over
//!    named variables (forward-mode dual numbers, finite-difference oracles,
//!    and an empirical differentiability probe).
//! 2. [`linalg`]: exact rational linear algebra, including the Farkas
//!    decision procedure with two-sided certificates, strict-feasibility
//!    search, nullspace/rank computations, and a Fourier–Motzkin oracle.
//! 3. [`problem`]: the problem model (maximize an objective subject to
//!    `g_i >= 0` and `h_j == 0`), file loading, feasibility and active-set
//!    detection.
//! 4. [`engine`]: Fritz John / KKT multiplier computation with two independent
//!    inequality-only algorithms, constraint-qualification checks (LICQ,
//!    MFCQ), the equality-constraint kernel reduction with multiplier
//!    recovery, and certificate verification.
//! 5. [`report`]: human-readable and JSON rendering of certificates.
//!
//! Gradients are computed in floats and then rationalized exactly; all
//! multiplier algebra downstream runs on arbitrary-precision rationals, so
//! emitted certificates satisfy their defining identities with zero residual.

pub mod engine;
pub mod expr;
pub mod linalg;
pub mod problem;
pub mod rational;
pub mod report;
pub mod rng;

pub use engine::{
    full_certify, verify_certificate, CertifyOutcome, FjCertificate, QualificationReport,
    Tolerances,
};
pub use expr::{Expr, Point};
pub use linalg::{ConeCertificate, LinFunc, StrictWitness};
pub use problem::{load_problem, Problem};
pub use rational::Rat;
