//! Channel model, gauge transformations, upper bounds and discrete optimizers
//! for SISO channels parametrized by 1-bit programmable RIS elements.
//!
//! The end-to-end channel for load reflection coefficients `r` is
//!
//! ```text
//!   h(r) = h0 + a' (I - Phi(r) Gamma)^{-1} Phi(r) b,   Phi(r) = diag(r)
//! ```
//!
//! and every bound in [`bounds`] and [`sdr`] is an upper bound on `|h|^2` over
//! all binary configurations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod gauge;
pub mod io;
mod linalg;
pub mod model;
pub mod optimizers;
pub mod scenario;
pub mod sdr;
pub mod woodbury;

pub use nalgebra::Complex;

pub use channel::{channel_gain, channel_gain_full, encode_loads, reduce_model, shannon_capacity, FixedState};
pub use model::{ControlVector, LoadVector, ModelParameters};
pub use woodbury::{prepare_baseline, woodbury_channel, BaselineFactorization};

use thiserror::Error;

pub type C64 = Complex<f64>;
pub type CVector = nalgebra::DVector<C64>;
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Default cap on the 1-norm condition number of any resolvent that is
/// factorized.
pub const CONDITION_CAP: f64 = 1e12;

/// Characteristic impedance behind the power-wave normalization of every
/// scattering quantity in this crate, in ohms. No formula depends on it.
pub const REFERENCE_IMPEDANCE_OHM: f64 = 50.0;

/// The gauge stage that rejected its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum GaugeStage {
    DiagonalSimilarity,
    ComplexScaling,
    Mobius,
}

impl std::fmt::Display for GaugeStage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GaugeStage::DiagonalSimilarity => "diagonal-similarity",
            GaugeStage::ComplexScaling => "complex-scaling",
            GaugeStage::Mobius => "mobius",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in `{field}`: expected {expected}, got {got}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite entry in `{field}`")]
    NonFinite { field: &'static str },
    #[error("model must have at least one element")]
    Empty,
    #[error("resolvent is singular or ill-conditioned (condition number {condition:e})")]
    SingularResolvent { condition: f64 },
    #[error("Woodbury capacitance system is singular (condition number {condition:e})")]
    SingularUpdate { condition: f64 },
    #[error("flip index {index} out of range for {n_s} elements")]
    FlipOutOfRange { index: usize, n_s: usize },
    #[error("noise power must be positive, got {0}")]
    InvalidNoise(f64),
    #[error("transmit power must be positive, got {0}")]
    InvalidPower(f64),
    #[error("gauge parameter `{which}` is zero")]
    ZeroGaugeEntry { which: String },
    #[error("I - m Gamma is ill-conditioned (condition number {condition:e})")]
    IllConditionedMobius { condition: f64 },
    #[error("Mobius parameter hits a pole: m * {which}^* = 1")]
    ForbiddenPole { which: &'static str },
    #[error("Mobius parameter must satisfy |m| < 1, got |m| = {modulus}")]
    NonContractiveM { modulus: f64 },
    #[error("{stage} stage: {source}")]
    GaugeStage {
        stage: GaugeStage,
        #[source]
        source: Box<Error>,
    },
    #[error("loads are not unit modulus (|alpha| = {alpha_abs}, |beta| = {beta_abs})")]
    NotUnitModulusLoads { alpha_abs: f64, beta_abs: f64 },
    #[error("Gamma is not contractive (largest singular value {sigma_max})")]
    NotContractive { sigma_max: f64 },
    #[error("relaxation solver did not converge: {status:?} after {iterations} iterations")]
    SolverNotConverged {
        status: risbound_sdp::SolveStatus,
        iterations: usize,
        /// The uncertified solution, kept for inspection.
        solution: Box<sdr::SdrSolution>,
    },
    #[error("conic solver: {0}")]
    Solver(#[from] risbound_sdp::SdpError),
    #[error("matrix has zero trace")]
    ZeroMatrix,
    #[error("{n_s} elements exceed the exhaustive-search cap of {cap}")]
    TooLarge { n_s: usize, cap: usize },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
