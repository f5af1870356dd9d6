//! Moment-based rounding toolkit for sum-of-squares (Lasserre) relaxations.
//!
//! The crate is organized around a validated pseudoexpectation data structure
//! ([`pseudo::MomentOracle`]) that can be fed either by empirical sample
//! distributions or by the embedded first-order SDP solver ([`relax`]).  On
//! top of it sit the rounding pipelines:
//!
//! * [`nonneg`] — maximization of a nonnegative-coefficient form over the
//!   unit sphere by direct rounding plus entropy-guided conditioning.
//! * [`asvp`] — search for an analytically sparse (large `L4/L2`) vector in a
//!   subspace via four candidate-generating subroutines.
//! * [`planted`] — two-stage recovery of a sparse vector planted in a random
//!   subspace (degree-4 relaxation + Gaussian rounding, then an L1 program).
//! * [`lowrank`] — maximization of a sum-of-squares-of-quadratics form via an
//!   epsilon net over the coefficient ball.
//! * [`sse`] — regular graphs, top eigenspaces, the `K_lambda` quantity and
//!   both directions of the norm/expansion correspondence.

pub mod asvp;
pub mod empirical;

pub mod graph;
pub mod io;
pub mod lowrank;
pub mod monomial;
pub mod nonneg;
pub mod planted;

pub mod poly;
pub mod pseudo;
pub mod relax;
pub mod seeds;
pub mod solver;
pub mod sse;

pub mod subspace;
pub mod tensor;

mod defaults;

pub use defaults::Defaults;
pub use empirical::EmpiricalDistribution;
pub use monomial::Monomial;
pub use poly::Polynomial;
pub use pseudo::MomentOracle;
pub use subspace::{Measure, Subspace};
pub use tensor::TensorForm;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree overflow: operation needs degree {needed} but oracle level is {level}")]
    DegreeOverflow { needed: usize, level: usize },
    #[error("tensor order must be even, got {0}")]
    OddOrder(usize),
    #[error("empty sample set")]
    EmptySamples,
    #[error("zero vector")]
    ZeroVector,
    #[error("reweighing mass {mass:.3e} below tolerance {tol:.3e}")]
    MassBelowTolerance { mass: f64, tol: f64 },
    #[error("covariance not positive semidefinite: min eigenvalue {0:.3e}")]
    InvalidCovariance(f64),
    #[error("guard: {0}")]
    Guard(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no conditioning tuple achieves the required entropy drop (best {best:.3e}, needed {needed:.3e})")]
    NoProgress { best: f64, needed: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance for floating comparisons unless an operation states
/// otherwise.
pub const DEFAULT_TOL: f64 = 1e-9;
