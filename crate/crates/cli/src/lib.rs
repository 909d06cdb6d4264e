//! Command-line orchestration: scenario generation, bounds, optimizers,
//! size sweeps and the verification suite.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod verify;

pub use config::{CapacityParams, Format, Method, ModelSource, RunConfig};
pub use error::{CliError, CliResult};
pub use report::Report;
pub use run::{cmd_bound, cmd_gen, cmd_optimize, cmd_sweep, evaluate_point};
pub use verify::{cmd_verify, VerifyOutcome};
