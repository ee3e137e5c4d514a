//! Numerical toolkit for *discrepancy values* of complex matrices.
//!
//! The k-th discrepancy norm of a square matrix `A` is the minimum, over all
//! complex shifts `α`, of the Ky-Fan k-norm of `A − αI`.  Discrepancy values
//! are the consecutive differences of those norms; for Hermitian matrices they
//! reduce to half-spreads of the spectrum, and for normal matrices to a planar
//! facility-location problem over the eigenvalues.  This crate provides:
//!
//! * a dense complex-matrix core with Jacobi-based SVD and Hermitian
//!   eigendecomposition ([`matcore`]),
//! * weak-majorization utilities ([`majorize`]),
//! * discrepancy solvers, closed forms, and an independent grid oracle
//!   ([`discrepancy`]),
//! * a registry of commutator/majorization inequalities with a seeded fuzzer
//!   ([`commutator`]),
//! * a structured `A = U X V*` decomposition exposing the discrepancy data of
//!   a Hermitian matrix ([`xdecomp`]).
//!
//! Everything is deterministic: randomized routines take explicit 64-bit
//! seeds and use a fixed, platform-independent generator (ChaCha8, with
//! per-trial seeds derived by a SplitMix64 mix).

pub mod commutator;
pub mod discrepancy;
pub mod majorize;
pub mod matcore;
pub mod xdecomp;

use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// `Dimension`, `Domain`, and `NonFinite` describe bad inputs; `Numerical` is
/// reserved for genuine solver failures (non-convergence, tripped internal
/// consistency checks) on inputs that were accepted.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite entry at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use matcore::{ComplexMatrix, HermEigResult, SvdResult};
pub use majorize::{InequalityVerdict, SpectrumVector, Tolerance};
pub use discrepancy::{AlphaSolverConfig, DiscrepancyResult};
pub use commutator::{FuzzReport, InequalityId, InequalityInputs, InequalityReport, MatrixClass};
pub use xdecomp::CXMatrix;
