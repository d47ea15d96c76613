use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode basis must be non-empty")]
    EmptyBasis,
    #[error("duplicate mode label `{0}`")]
    DuplicateMode(String),
    #[error("mode `{0}` is not in the basis")]
    UnknownMode(String),
    #[error("states live on different mode bases")]
    BasisMismatch,
    #[error("invalid peaked parameters: {0}")]
    InvalidParams(String),
    #[error("particle count mismatch: {bra} vs {ket}")]
    ParticleCountMismatch { bra: usize, ket: usize },
    #[error("particle statistics mismatch")]
    StatisticsMismatch,
    #[error("an elementary ket needs at least one particle")]
    NoParticles,
    #[error("state has no terms")]
    EmptyState,
    #[error("ensemble weight {0} is negative or not finite")]
    InvalidWeight(f64),
    #[error("ensemble has no positive weight")]
    ZeroEnsemble,
    #[error("{n} particles exceed the permutation-sum cap of {cap}")]
    PermutationCapExceeded { n: usize, cap: usize },
    #[error("global trace {0:e} is not positive")]
    NonPositiveTrace(f64),
    #[error("projection probability is zero: no particle configuration reaches the regions")]
    ZeroProjection,
    #[error("region list {0}")]
    InvalidRegions(String),
    #[error("degree of indistinguishability undefined: no permutation is detectable")]
    Undetectable,
    #[error("matrix is not X-shaped (off-X entry {0:e})")]
    NotXShaped(f64),
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Dimension { expected: usize, rows: usize, cols: usize },
    #[error("noise probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("eigen-decomposition failed")]
    EigenFailure,
    #[error("invalid configuration: {0}")]
    Config(String),
}
