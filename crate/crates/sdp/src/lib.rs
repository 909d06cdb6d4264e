//! Dense semidefinite programming in standard (maximization) form:
//!
//! ```text
//!   maximize    <C, M>
//!   subject to  <A_k, M> = b_k,   k = 1..m
//!               M  positive semidefinite
//! ```
//!
//! with real symmetric data. The dual is `minimize b'y s.t. sum_k y_k A_k - C >= 0`.
//!
//! The embedded solver is a first-order operator-splitting method (an
//! alternating-direction augmented Lagrangian on the dual) with diagonal
//! equilibration and an active-eigenspace polish step. Any other solver can be
//! plugged in through [`ConicSolver`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod admm;
mod cone;
mod polish;
mod program;
mod scaling;
mod svec;

pub use admm::AdmmSolver;
pub use cone::{min_eigenvalue, psd_project};
pub use program::{ConicProgram, ConicSolution, Residuals, SolveStatus, SolverOptions};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("objective matrix is {rows}x{cols}, expected {dim}x{dim}")]
    ObjectiveDimension { dim: usize, rows: usize, cols: usize },
    #[error("constraint {index} is {rows}x{cols}, expected {dim}x{dim}")]
    ConstraintDimension {
        index: usize,
        dim: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix `{which}` is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { which: String, asymmetry: f64 },
    #[error("non-finite value in problem data ({which})")]
    NonFiniteData { which: String },
    #[error("numerical failure: non-finite iterate at iteration {iteration}")]
    NumericalFailure { iteration: usize },
}

/// A solver for [`ConicProgram`]s. Implementations must be stateless between
/// calls so that independent solves can run concurrently.
pub trait ConicSolver: Send + Sync {
    fn solve(&self, problem: &ConicProgram, opts: &SolverOptions) -> Result<ConicSolution, SdpError>;
}

/// Solves `problem` with the embedded operator-splitting solver.
pub fn solve_sdp(problem: &ConicProgram, opts: &SolverOptions) -> Result<ConicSolution, SdpError> {
    AdmmSolver.solve(problem, opts)
}
