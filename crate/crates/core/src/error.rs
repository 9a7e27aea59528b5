use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not positive semidefinite")]
    NotPsd,

    #[error("expected a rank-one matrix, found rank {0}")]
    NotRankOne(usize),

    #[error("expected a positive definite matrix")]
    NotPositiveDefinite,

    #[error("square root is not representable in this scalar type")]
    SqrtNotRepresentable,

    #[error("singular transformation")]
    Singular,

    #[error("factors {0} and {1} are not an orthogonal rank-one pair")]
    NotOrthogonalPair(usize, usize),

    #[error("cone system is rank-deficient")]
    RankDeficient,

    #[error("factorization has no factors")]
    Empty,

    #[error("precondition violated: {}", .0.join("; "))]
    Precondition(Vec<String>),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("generator: {0}")]
    Generator(String),

    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
