//! Hardcore chains from the empty set, simulated by notifications only.
//!
//! With two labels a vertex decides its update from two facts about each
//! neighbor: whether it currently holds 1 and whether it proposes 1. In the
//! sparse-occupancy regime both are rare, so per transition a vertex tells
//! each neighbor only the chains in which it holds or proposes 1, one word per
//! chain, all chains to the same neighbor in one request.

use serde::Serialize;

use super::batch::BatchState;
use super::CubeError;
use crate::chain::{check_regime, propose_vertex, ChainParams, RegimeGate};
use crate::model::{GibbsModel, ModelFamily};
use crate::net::{charge_phase, phase_load, MessageLedger, RoutingRequest};

/// Per-vertex word counts accumulated over a whole fast-path run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FastStats {
    pub transitions: u64,
    pub total_words: u64,
    pub max_words_sent: u64,
    pub max_words_received: u64,
}

impl FastStats {
    pub fn max_words(&self) -> u64 {
        self.max_words_sent.max(self.max_words_received)
    }
}

/// Runs `k` hardcore chains for `params.t_mix` transitions. Chain `i` uses
/// the same keyed randomness as `sample(model, params, seed, i)`.
pub fn hardcore_fast_batch(
    model: &GibbsModel,
    k: usize,
    params: &ChainParams,
    seed: u64,
    ledger: &mut MessageLedger,
) -> Result<(BatchState, FastStats), CubeError> {
    if model.family() != ModelFamily::Hardcore {
        return Err(CubeError::Unsupported("the fast path needs the hardcore model"));
    }
    let n = model.n();
    if k > n {
        return Err(CubeError::TooManyChains { k, n });
    }
    check_regime(model, &RegimeGate::default()).map_err(CubeError::Regime)?;
    assert_eq!(ledger.machines(), n, "ledger sized for a different clique");

    let g = model.graph();
    // occupied / proposing-1 flags, chain-major
    let mut occ = vec![false; n * k];
    let mut prop = vec![false; n * k];
    let mut active = vec![false; n * k];
    let mut sent = vec![0u64; n];
    let mut received = vec![0u64; n];
    let mut stats = FastStats::default();
    let mut requests = Vec::new();

    for t in 0..params.t_mix {
        for i in 0..k {
            for v in 0..n {
                let s = propose_vertex(model, params.p, seed, v, t, i as u64);
                active[i * n + v] = s.is_some();
                prop[i * n + v] = s == Some(1);
            }
        }
        // notifications: what each vertex announces to every neighbor
        requests.clear();
        for v in 0..n {
            let words = (0..k).filter(|&i| occ[i * n + v] || prop[i * n + v]).count() as u64;
            if words == 0 {
                continue;
            }
            for &w in g.neighbors(v) {
                requests.push(RoutingRequest::new(v as u32, w, words));
                sent[v] += words;
                received[w as usize] += words;
                stats.total_words += words;
            }
        }
        if !requests.is_empty() {
            charge_phase("fast-notify", &phase_load(n, &requests), ledger);
        }
        // each vertex decides from its own flags and what it heard
        let mut next = occ.clone();
        for i in 0..k {
            let base = i * n;
            for v in 0..n {
                if !active[base + v] {
                    continue;
                }
                let (xv, sv) = (occ[base + v], prop[base + v]);
                let rejected = g.neighbors(v).iter().any(|&w| {
                    let w = base + w as usize;
                    let sw = active[w] && prop[w];
                    (xv && sw) || (sv && occ[w]) || (sv && sw)
                });
                if !rejected {
                    next[base + v] = sv;
                }
            }
        }
        occ = next;
        stats.transitions += 1;
    }
    stats.max_words_sent = sent.iter().copied().max().unwrap_or(0);
    stats.max_words_received = received.iter().copied().max().unwrap_or(0);

    let mut state = BatchState::initial(model, seed, k);
    for i in 0..k {
        for v in 0..n {
            state.set(v, i, occ[i * n + v] as u32);
        }
    }
    Ok((state, stats))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chain::sample;
    use crate::graph::Graph;
    use crate::model::{make_hardcore, make_potts, Fugacity, Temperature};

    #[test]
    fn zero_fugacity_sends_nothing() {
        let m = make_hardcore(Arc::new(Graph::cycle(10).unwrap()), Fugacity::zero());
        let mut ledger = MessageLedger::new(10);
        let (state, stats) = hardcore_fast_batch(&m, 10, &ChainParams::new(0.5, 30), 7, &mut ledger).unwrap();
        assert_eq!(stats.total_words, 0);
        assert_eq!(ledger.rounds_total(), 0);
        assert!(state.columns().iter().all(|c| c.0.iter().all(|&x| x == 0)));
    }

    #[test]
    fn matches_reference_chains() {
        for seed in 0..4 {
            let g = Arc::new(Graph::gnp(12, 0.3, seed).unwrap());
            let d = g.max_degree().max(2);
            let lambda = Fugacity::from_f64(0.3 / (d - 1) as f64).unwrap();
            let m = make_hardcore(g, lambda);
            let params = ChainParams::new(0.5, 40);
            let mut ledger = MessageLedger::new(12);
            let (state, stats) = hardcore_fast_batch(&m, 12, &params, seed, &mut ledger).unwrap();
            for i in 0..12 {
                assert_eq!(state.column(i), sample(&m, &params, seed, i as u64));
            }
            assert!(stats.total_words > 0);
        }
    }

    #[test]
    fn rejects_outside_regime_and_other_models() {
        let g = Arc::new(Graph::cycle(6).unwrap());
        let mut ledger = MessageLedger::new(6);
        let params = ChainParams::new(0.5, 3);
        let hot = make_hardcore(g.clone(), Fugacity::one());
        assert!(matches!(
            hardcore_fast_batch(&hot, 6, &params, 0, &mut ledger),
            Err(CubeError::Regime(_))
        ));
        let potts = make_potts(g.clone(), 5, Temperature::Infinite).unwrap();
        assert!(hardcore_fast_batch(&potts, 6, &params, 0, &mut ledger).is_err());
        let cold = make_hardcore(g, "0.1".parse().unwrap());
        assert!(matches!(
            hardcore_fast_batch(&cold, 7, &params, 0, &mut ledger),
            Err(CubeError::TooManyChains { .. })
        ));
    }
}
