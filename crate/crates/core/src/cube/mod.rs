//! Many chains at once: one transition of `k <= n` chains in `O(n^{1/3})`
//! rounds by splitting the (vertex, vertex, chain) cube among the machines,
//! the matching Hamiltonian gather, and a notification-only fast path for
//! sparse hardcore chains.

mod batch;
mod fast;
mod partition;

pub use batch::{
    flatten, gather_hamiltonians, simulate_transition_batch, BatchState, Cells, CubeSimulator, FlattenMode,
    FlattenedSlab, SlabValues, Subcube,
};
pub use fast::{hardcore_fast_batch, FastStats};
pub use partition::{partition_cube, partition_cube_for, CubePartition, SubcubeIndex, Unit};

use crate::chain::ChainError;

/// Max per-machine words of one batch transition over `n^{4/3}`, measured on
/// random 4-regular hardcore instances and frozen.
pub const BATCH_WORDS_CONSTANT: f64 = 6.0;
/// Rounds of one batch transition over `n^{1/3}`, measured and frozen.
pub const BATCH_ROUNDS_CONSTANT: f64 = 7.0;
/// Fast path max per-vertex words over `k t_mix` at `n = k = 64`, `D = 8`.
pub const FAST_WORDS_CONSTANT: f64 = 0.68;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CubeError {
    #[error("{k} chains do not fit on {n} machines")]
    TooManyChains { k: usize, n: usize },
    #[error("batch has {n} vertices and {k} chains, which does not match the simulator")]
    ShapeMismatch { n: usize, k: usize },
    #[error("flatten mode does not match the subcube payload")]
    ModeMismatch,
    #[error("doubled Hamiltonian {doubled} of chain {chain} is odd")]
    Parity { chain: usize, doubled: u64 },
    #[error(transparent)]
    Regime(ChainError),
    #[error("{0}")]
    Unsupported(&'static str),
}
