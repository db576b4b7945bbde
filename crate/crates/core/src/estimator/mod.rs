//! Partition functions from samples: cooling schedules, telescoping ratio
//! estimates with median boosting, and the triangle-detection reduction.

mod estimate;
mod sampler;
mod schedule;
mod triangle;

pub use estimate::{
    count_colorings, count_hardcore, estimate_log_ratio, estimate_partition, estimate_partition_with, estimate_ratio,
    EstimateOptions, EstimateResult, LogAccumulator, DEFAULT_REPETITIONS, DEFAULT_SAMPLE_BUDGET,
    DEFAULT_SAMPLE_CONSTANT,
};
pub use sampler::{BatchSampler, CubeSampler, HardcoreFastSampler, ReferenceSampler, SamplerKind};
pub use schedule::{
    beta_cap, build_schedule, dyer_frieze_ratio, hardcore_anchor_fugacity, CoolingSchedule, SCHEDULE_VARIANCE_BOUND,
};
pub use triangle::{detect_triangle, detection_epsilon, TriangleMode, TriangleReport};

use crate::chain::ChainError;
use crate::cube::CubeError;
use crate::model::{ModelError, OracleError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimateError {
    #[error("relative error must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("sample constant must be positive, got {0}")]
    BadSampleConstant(f64),
    #[error("at least one repetition is needed")]
    NoRepetitions,
    #[error("no samples to estimate from")]
    NoSamples,
    #[error("run needs {needed} samples, over the budget of {budget}")]
    SampleBudget { needed: u64, budget: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
