//! Keyed pseudorandom streams.
//!
//! Every random decision in the simulator is addressed by a [`StreamKey`]
//! (entity, round, purpose, chain) under a global seed. Two computations that
//! ask for the same key get bitwise-identical draws no matter which machine
//! performs them or in which order, which is what lets the batch simulator
//! replay the reference chain exactly.

use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

/// The generator handed out for one key.
pub type RngStream = SplitMix64;

/// The logical owner of a random decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entity {
    Global,
    Vertex(u32),
    /// An undirected edge; endpoint order is irrelevant.
    Edge(u32, u32),
    Machine(u32),
}

impl Entity {
    pub fn edge(u: u32, v: u32) -> Self {
        if u <= v {
            Entity::Edge(u, v)
        } else {
            Entity::Edge(v, u)
        }
    }

    fn code(self) -> [u64; 2] {
        match self {
            Entity::Global => [0, 0],
            Entity::Vertex(v) => [1, v as u64],
            Entity::Edge(u, v) => {
                let (a, b) = if u <= v { (u, v) } else { (v, u) };
                [2, ((a as u64) << 32) | b as u64]
            }
            Entity::Machine(m) => [3, m as u64],
        }
    }
}

/// What the randomness is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Initial labeling.
    Init,
    /// Activation coin followed by the proposal draw.
    Propose,
    /// Edge acceptance draw.
    Accept,
    /// The three Bernoulli(lambda) coins of the directed-edge view.
    Coins,
    /// Auxiliary draws of coupling experiments.
    Coupling,
    Custom(u32),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Init => 1,
            Purpose::Propose => 2,
            Purpose::Accept => 3,
            Purpose::Coins => 4,
            Purpose::Coupling => 5,
            Purpose::Custom(c) => 0x100 + c as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub entity: Entity,
    pub round: u64,
    pub purpose: Purpose,
    pub chain: u64,
}

impl StreamKey {
    pub fn new(entity: Entity, round: u64, purpose: Purpose, chain: u64) -> Self {
        StreamKey {
            entity,
            round,
            purpose,
            chain,
        }
    }

    pub fn vertex(v: u32, round: u64, purpose: Purpose, chain: u64) -> Self {
        Self::new(Entity::Vertex(v), round, purpose, chain)
    }

    pub fn edge(u: u32, v: u32, round: u64, purpose: Purpose, chain: u64) -> Self {
        Self::new(Entity::edge(u, v), round, purpose, chain)
    }
}

// splitmix64 finalizer
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, word: u64) -> u64 {
    mix64(state.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ mix64(word))
}

/// Folds `parts` into `seed`, giving a new seed for a sub-experiment
/// (repetition, schedule term, sample wave, ...).
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(seed ^ 0x5851_f42d_4c95_7f2d), |s, &p| absorb(s, p))
}

/// The stream for `key` under `seed`. Same arguments give the same stream.
pub fn rng_stream(seed: u64, key: StreamKey) -> RngStream {
    let [kind, id] = key.entity.code();
    let digest = derive_seed(seed, &[kind, id, key.round, key.purpose.code(), key.chain]);
    SplitMix64::seed_from_u64(digest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, RngCore};

    fn prefix(seed: u64, key: StreamKey, words: usize) -> Vec<u64> {
        let mut rng = rng_stream(seed, key);
        (0..words).map(|_| rng.next_u64()).collect()
    }

    #[test]
    fn same_key_same_stream() {
        let key = StreamKey::vertex(0, 0, Purpose::Propose, 0);
        let a: Vec<f64> = {
            let mut r = rng_stream(7, key);
            (0..100).map(|_| r.gen()).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng_stream(7, key);
            (0..100).map(|_| r.gen()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_keys_differ_on_first_128_bits() {
        let base = StreamKey::vertex(0, 0, Purpose::Propose, 0);
        let variants = [
            StreamKey::vertex(1, 0, Purpose::Propose, 0),
            StreamKey::vertex(0, 1, Purpose::Propose, 0),
            StreamKey::vertex(0, 0, Purpose::Accept, 0),
            StreamKey::vertex(0, 0, Purpose::Propose, 1),
            StreamKey::edge(0, 1, 0, Purpose::Propose, 0),
            StreamKey::new(Entity::Machine(0), 0, Purpose::Propose, 0),
        ];
        let p = prefix(7, base, 2);
        for v in variants {
            assert_ne!(p, prefix(7, v, 2), "{v:?}");
        }
    }

    #[test]
    fn distinct_seeds_differ() {
        let key = StreamKey::vertex(3, 5, Purpose::Init, 2);
        assert_ne!(prefix(7, key, 2), prefix(8, key, 2));
    }

    #[test]
    fn edge_key_is_orientation_free() {
        assert_eq!(
            prefix(1, StreamKey::edge(4, 9, 3, Purpose::Accept, 0), 4),
            prefix(1, StreamKey::edge(9, 4, 3, Purpose::Accept, 0), 4)
        );
    }

    #[test]
    fn derived_seeds_separate_parts() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_ne!(derive_seed(1, &[]), derive_seed(1, &[0]));
        assert_eq!(derive_seed(5, &[2, 3]), derive_seed(5, &[2, 3]));
    }

    #[test]
    fn uniform_draws_look_uniform() {
        // many short streams, as the simulator uses them
        let n = 200_000u64;
        let mean: f64 = (0..n)
            .map(|v| {
                rng_stream(11, StreamKey::vertex(v as u32, 0, Purpose::Propose, 0)).gen::<f64>()
            })
            .sum::<f64>()
            / n as f64;
        // sd of the mean is sqrt(1/12/n) ~ 6.5e-4
        assert!((mean - 0.5).abs() < 4e-3, "{mean}");
    }
}
