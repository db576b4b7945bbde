//! Lenzen routing as a cost model.
//!
//! Any pattern in which every machine sends and receives at most `n` words
//! is delivered in one round; a pattern with maximum load `L` costs
//! `ceil(L / n)` rounds. Contents are handed over instantly by the caller.

use super::ledger::{MachineId, MessageLedger, PhaseLoad};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingRequest {
    pub src: MachineId,
    pub dst: MachineId,
    pub words: u64,
}

impl RoutingRequest {
    pub fn new(src: u32, dst: u32, words: u64) -> Self {
        RoutingRequest {
            src: MachineId(src),
            dst: MachineId(dst),
            words,
        }
    }
}

/// Rounds needed to deliver a phase whose largest per-machine load is `max_load`.
pub fn routing_rounds(max_load: u64, n: usize) -> u64 {
    if max_load == 0 {
        0
    } else {
        max_load.div_ceil(n as u64)
    }
}

/// Aggregates `requests` into per-machine loads. Self-addressed requests are dropped.
pub fn phase_load(n: usize, requests: &[RoutingRequest]) -> PhaseLoad {
    let mut load = PhaseLoad::new(n);
    for r in requests {
        debug_assert!(r.words >= 1, "empty routing request");
        load.add(r.src.index(), r.dst.index(), r.words);
    }
    load
}

/// Charges an aggregated phase to the ledger and returns its round count.
pub fn charge_phase(label: &str, load: &PhaseLoad, ledger: &mut MessageLedger) -> u64 {
    let rounds = routing_rounds(load.max_load(), ledger.machines());
    ledger.record(label, load, rounds);
    rounds
}

/// Routes one batch of requests through the clique and returns the rounds it took.
pub fn schedule_routing(requests: &[RoutingRequest], ledger: &mut MessageLedger) -> u64 {
    let load = phase_load(ledger.machines(), requests);
    charge_phase("routing", &load, ledger)
}
