//! Reference implementation of the distributed Metropolis-Hastings chain, one
//! chain at a time, with its coupling harnesses and mixing bounds.

mod coins;
mod coupling;
mod mixing;
mod step;

pub use coins::{
    apply_coin_view, coin_accepts, draw_coins, exact_coin_kernel_full_activity, potts_coin_step, CoinTriple,
};
pub use coupling::{
    coupled_step, empirical_contraction, exact_coupled_marginals_full_activity, potts_coupled_given,
    potts_coupled_proposals, CoupledOutcome,
};
pub use mixing::{
    check_regime, choose_p, contraction_bound, default_p, delta_for_samples, hardcore_bound_exact, mixing_time,
    mixing_time_from_rho, p_grid, potts_bound_exact, BoundFamily, RegimeGate,
};
pub use step::{
    apply_proposals, edge_accept, edge_accept_probability, edge_accept_probability_exact,
    exact_kernel_full_activity, propose, propose_vertex, sample, step, step_into, Proposal, StepScratch,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("outside the fast-mixing regime: {0}")]
    OutsideRegime(String),
    #[error("no mixing guarantee: contraction factor {rho} is not below 1")]
    NoContraction { rho: f64 },
    #[error("TV budget must lie in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("coupled states must differ at exactly one vertex, they differ at {0}")]
    NotAdjacent(usize),
    #[error("{0}")]
    Unsupported(&'static str),
}

/// Activation probability, transition count and TV budget of a chain run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub p: f64,
    pub t_mix: u64,
    pub delta: f64,
}

impl ChainParams {
    pub fn new(p: f64, t_mix: u64) -> Self {
        assert!((0.0..=1.0).contains(&p), "activation probability {p} outside [0, 1]");
        ChainParams { p, t_mix, delta: 0.0 }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}
