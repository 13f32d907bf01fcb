use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("vectors are linearly dependent (pivot norm {pivot:e} at index {index})")]
    RankDeficient { index: usize, pivot: f64 },

    #[error("not normalized: norm deviation {deviation:e}")]
    Normalization { deviation: f64 },

    #[error("negative coefficient {value} at index {index}")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("not an orthonormal basis: Gram deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("not unitary: deviation {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("Renyi order must be positive, got {0}")]
    InvalidOrder(f64),

    #[error("wrong length: expected {expected}, found {found}")]
    WrongLength { expected: usize, found: usize },

    #[error("optimizer budget must be nonzero")]
    ZeroBudget,

    #[error("observable has degenerate eigenvalues ({0:e} apart)")]
    DegenerateObservable(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not maximally entangled in the declared form: {0}")]
    NotMaximallyEntangled(String),

    #[error("scenario lacks what the relation needs: {0}")]
    IncompatibleScenario(String),

    #[error("invalid search target: {0}")]
    InvalidTarget(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
