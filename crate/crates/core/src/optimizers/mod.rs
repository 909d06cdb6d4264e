//! Discrete configuration optimizers.

mod cd;
mod es;
mod ga;
mod psdr;

pub use cd::{coordinate_descent, RANDOM_STARTS};
pub use es::{exhaustive_search, exhaustive_search_capped, ES_CAP};
pub use ga::{genetic_algorithm, GaParams};
pub use psdr::{project_sdr, quantize_load};

use serde::Serialize;

use crate::model::ControlVector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerResult {
    pub v: ControlVector,
    /// `|h(v)|^2`, evaluated directly at `v`.
    pub gain: f64,
    pub evaluations: u64,
    /// Best gain after each iteration, for optimizers that iterate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
    pub rng_seed: u64,
    /// Elements whose value was chosen by a fallback rule.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flagged: Vec<usize>,
}

/// Candidates within this relative margin of the incumbent count as ties.
pub(crate) const TIE_TOL: f64 = 1e-12;

pub(crate) fn beats(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + TIE_TOL * incumbent.abs()
}
