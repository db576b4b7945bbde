//! The directed-edge, three-coin view of the Potts chain.
//!
//! Each undirected edge flips three Bernoulli(lambda) coins before proposals
//! are made. Seen from the directed edge `(u, v)` the edge is accepted iff
//! `X_u != s_v` or coin 1 is heads, `X_v != s_u` or coin 2 is heads, and
//! `s_u != s_v` or coin 3 is heads; conditions touching a blank proposal
//! hold. Coin 1 of `(u, v)` is coin 2 of `(v, u)`, coin 3 is shared.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::step::{accumulate, apply_proposals, propose_vertex, Proposal};
use super::{ChainError, ChainParams};
use crate::model::{GibbsModel, Label, Labeling, ModelFamily};
use crate::net::{rng_stream, Purpose, StreamKey};

/// Coins of one undirected edge in its canonical `(min, max)` orientation;
/// `true` is heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoinTriple {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
}

impl CoinTriple {
    pub const HEADS: CoinTriple = CoinTriple {
        c1: true,
        c2: true,
        c3: true,
    };

    /// The triple as seen from the directed edge `(a, b)`.
    pub fn directed(self, a: usize, b: usize) -> CoinTriple {
        if a < b {
            self
        } else {
            CoinTriple {
                c1: self.c2,
                c2: self.c1,
                c3: self.c3,
            }
        }
    }

    /// All eight outcomes.
    pub fn all() -> impl Iterator<Item = CoinTriple> {
        (0u8..8).map(|b| CoinTriple {
            c1: b & 1 == 1,
            c2: b & 2 == 2,
            c3: b & 4 == 4,
        })
    }

    /// Probability of this outcome when heads has probability `lambda`.
    pub fn probability(self, lambda: &BigRational) -> BigRational {
        let tails = BigRational::one() - lambda;
        [self.c1, self.c2, self.c3]
            .iter()
            .fold(BigRational::one(), |acc, &h| acc * if h { lambda } else { &tails })
    }
}

fn require_potts(model: &GibbsModel) -> Result<(), ChainError> {
    match model.family() {
        ModelFamily::Potts { .. } if model.fugacity().value() <= 1.0 => Ok(()),
        ModelFamily::Potts { .. } => Err(ChainError::Unsupported("three-coin view needs lambda <= 1")),
        _ => Err(ChainError::Unsupported("three-coin view is defined for the Potts model only")),
    }
}

/// Coins of every edge (in `graph().edges()` order) at transition `t`.
pub fn draw_coins(model: &GibbsModel, seed: u64, t: u64, chain: u64) -> Vec<CoinTriple> {
    let lambda = model.fugacity().value();
    model
        .graph()
        .edges()
        .iter()
        .map(|&(u, v)| {
            let mut rng = rng_stream(seed, StreamKey::edge(u, v, t, Purpose::Coins, chain));
            CoinTriple {
                c1: rng.gen::<f64>() < lambda,
                c2: rng.gen::<f64>() < lambda,
                c3: rng.gen::<f64>() < lambda,
            }
        })
        .collect()
}

/// Whether edge `(u, v)` is accepted under `coins` seen from `(u, v)`.
#[inline]
pub fn coin_accepts(x_u: Label, x_v: Label, s_u: Proposal, s_v: Proposal, coins: CoinTriple) -> bool {
    let first = s_v.is_none_or(|s| x_u != s || coins.c1);
    let second = s_u.is_none_or(|s| x_v != s || coins.c2);
    let third = match (s_u, s_v) {
        (Some(a), Some(b)) => a != b || coins.c3,
        _ => true,
    };
    first && second && third
}

/// The deterministic part of a coin-view transition.
pub fn apply_coin_view(x: &Labeling, edges: &[(u32, u32)], proposals: &[Proposal], coins: &[CoinTriple]) -> Labeling {
    let mut rejected = vec![false; x.len()];
    for (&(u, v), &c) in edges.iter().zip(coins) {
        let (u, v) = (u as usize, v as usize);
        if !coin_accepts(x[u], x[v], proposals[u], proposals[v], c) {
            rejected[u] = true;
            rejected[v] = true;
        }
    }
    let mut next = x.clone();
    apply_proposals(&mut next, proposals, &rejected);
    next
}

/// One Potts transition through the three-coin view with the given coins.
/// Activation and proposals come from the same streams as [`super::step`].
pub fn potts_coin_step(
    model: &GibbsModel,
    x: &Labeling,
    params: &ChainParams,
    coins: &[CoinTriple],
    seed: u64,
    t: u64,
    chain: u64,
) -> Result<Labeling, ChainError> {
    require_potts(model)?;
    if coins.len() != model.graph().m() {
        return Err(ChainError::Unsupported("one coin triple per edge required"));
    }
    let props: Vec<Proposal> = (0..model.n())
        .map(|v| propose_vertex(model, params.p, seed, v, t, chain))
        .collect();
    Ok(apply_coin_view(x, model.graph().edges(), &props, coins))
}

/// Exact one-step kernel of the coin view with every vertex active.
pub fn exact_coin_kernel_full_activity(
    model: &GibbsModel,
    x: &Labeling,
) -> Result<Vec<(Labeling, BigRational)>, ChainError> {
    require_potts(model)?;
    let q = model.alphabet_size();
    let n = model.n();
    let m = model.graph().m();
    let lambda = model.fugacity().exact().clone();
    let p_props = BigRational::new(1.into(), num_bigint::BigInt::from(q).pow(n as u32));
    let mut out = Vec::new();
    for code in 0..(q as u64).pow(n as u32) {
        let props: Vec<Proposal> = (0..n).map(|v| Some(((code / (q as u64).pow(v as u32)) % q as u64) as Label)).collect();
        for cc in 0..8u64.pow(m as u32) {
            let coins: Vec<CoinTriple> = (0..m)
                .map(|e| {
                    let b = (cc >> (3 * e)) & 7;
                    CoinTriple {
                        c1: b & 1 == 1,
                        c2: b & 2 == 2,
                        c3: b & 4 == 4,
                    }
                })
                .collect();
            let p = coins.iter().fold(p_props.clone(), |acc, c| acc * c.probability(&lambda));
            if p.is_zero() {
                continue;
            }
            accumulate(&mut out, apply_coin_view(x, model.graph().edges(), &props, &coins), p);
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}
