//! Distributed Metropolis-Hastings sampling and partition-function estimation
//! for local Gibbs distributions, simulated on the CongestedClique with full
//! communication accounting.

pub mod chain;
pub mod cube;
pub mod estimator;
pub mod graph;
pub mod model;
pub mod net;

pub use graph::{Graph, GraphError};
pub use model::{
    exact_distribution, exact_partition, make_hardcore, make_pointer_model, make_potts, Fugacity, GibbsModel, Label,
    Labeling, ModelError, ModelFamily, Temperature,
};
pub use net::{MachineId, MessageLedger, RoutingRequest};
