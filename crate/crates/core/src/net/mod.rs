//! The CongestedClique machine model: machines `0..n`, synchronous rounds,
//! Lenzen-routing round accounting and keyed randomness.

mod ledger;
mod rng;
mod routing;

pub use ledger::{audit_ledger, AuditReport, LedgerSummary, MachineId, MessageLedger, PhaseLoad, PhaseRecord};
pub use rng::{derive_seed, rng_stream, Entity, Purpose, RngStream, StreamKey};
pub use routing::{charge_phase, phase_load, routing_rounds, schedule_routing, RoutingRequest};
