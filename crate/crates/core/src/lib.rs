//! Reservoir-computing identification and suppression of unknown additive
//! disturbances to low-dimensional chaotic flows.
//!
//! A reservoir is trained on a forced trajectory to map the observed state
//! to the forcing that produced it. Once trained it can estimate an unseen
//! disturbance from observations alone, and that estimate can be fed back
//! to cancel the disturbance.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod reservoir;
pub mod series;

pub use control::{
    run_delayed, run_loop, run_simple, surrogate_stability, ControlLoopConfig, LoopRecord, Scheme, Stability,
};
pub use dynamics::{integrate_forced, DynamicalSystem, ForcingKind, ForcingSignal, Lorenz, Rossler, Trajectory};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentKind, RunOutput};
pub use linalg::{DenseMatrix, RngSeed, SparseMatrix};
pub use metrics::{attractor_distance, coverage_ratio, moving_average, nrmse, SweepResult};
pub use reservoir::{Reservoir, ReservoirConfig};
pub use series::TimeSeries;
