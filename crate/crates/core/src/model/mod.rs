//! Local Gibbs distributions as pairwise Markov random fields, and exact
//! enumeration oracles for small instances.

mod config;
mod gibbs;
mod oracle;
mod params;

pub use config::{ModelConfig, ModelSpec, NumberText};
pub use gibbs::{make_hardcore, make_pointer_model, make_potts, GibbsModel, Label, Labeling, ModelFamily};
pub use oracle::{
    exact_distribution, exact_partition, partition_polynomial, ExactDistribution, OracleError, PartitionPolynomial,
    DEFAULT_ENUMERATION_CAP,
};
pub use params::{Fugacity, Temperature};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("the Potts model needs at least one color")]
    ZeroColors,
    #[error("fugacity must be finite and non-negative, got {0}")]
    NegativeFugacity(f64),
    #[error("inverse temperature must be non-negative, got {0}")]
    NegativeBeta(f64),
    #[error("cannot parse number `{0}`")]
    BadNumber(String),
    #[error("labeling has length {got}, graph has {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("label {label} is not admissible at vertex {vertex}")]
    InadmissibleLabel { vertex: usize, label: u32 },
    #[error("edge {{{0}, {1}}} carries a forbidden label pair")]
    ForbiddenEdge(usize, usize),
    #[error("invalid model config: {0}")]
    Config(String),
}
