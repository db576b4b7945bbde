use std::fmt;

use clique_gibbs::chain::ChainError;
use clique_gibbs::cube::CubeError;
use clique_gibbs::estimator::EstimateError;

/// Failure classes with stable exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Bad arguments or parameters.
    Usage,
    /// Parameters outside the fast-mixing regime (and no `--force`).
    Regime,
    /// Unreadable or malformed input, or unwritable output.
    Io,
    /// At least one verification check failed.
    Suite,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage => 1,
            Kind::Regime => 2,
            Kind::Io => 3,
            Kind::Suite => 4,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: anyhow::Error) -> Self {
        Failure { kind: Kind::Usage, error }
    }

    pub fn io(error: anyhow::Error) -> Self {
        Failure { kind: Kind::Io, error }
    }

    pub fn suite(msg: String) -> Self {
        Failure {
            kind: Kind::Suite,
            error: anyhow::anyhow!(msg),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<ChainError> for Failure {
    fn from(e: ChainError) -> Self {
        let kind = match e {
            ChainError::OutsideRegime(_) | ChainError::NoContraction { .. } => Kind::Regime,
            _ => Kind::Usage,
        };
        Failure { kind, error: e.into() }
    }
}

impl From<CubeError> for Failure {
    fn from(e: CubeError) -> Self {
        match e {
            CubeError::Regime(c) => c.into(),
            e => Failure::usage(e.into()),
        }
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::Chain(c) => c.into(),
            EstimateError::Cube(c) => c.into(),
            e => Failure::usage(e.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_errors_map_to_code_two() {
        let f: Failure = EstimateError::Chain(ChainError::OutsideRegime("q".into())).into();
        assert_eq!(f.kind.exit_code(), 2);
        let f: Failure = EstimateError::Cube(CubeError::Regime(ChainError::NoContraction { rho: 1.2 })).into();
        assert_eq!(f.kind.exit_code(), 2);
        let f: Failure = EstimateError::SampleBudget { needed: 2, budget: 1 }.into();
        assert_eq!(f.kind.exit_code(), 1);
        let f: Failure = std::io::Error::other("disk").into();
        assert_eq!(f.kind.exit_code(), 3);
    }
}
