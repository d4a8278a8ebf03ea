//! Crate-wide error type.

/// Errors produced by validation and precondition checks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix must be tall with at least one column (got {rows}x{cols})")]
    BadShape { rows: usize, cols: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("frame member {index} is not Hermitian within tolerance")]
    MemberNotHermitian { index: usize },
    #[error("matrix is not positive semidefinite within tolerance")]
    NotPsd,
    #[error("rank {rank} exceeds the requested factor width {cols}")]
    RankTooHigh { rank: usize, cols: usize },
    #[error("matrix block is not unitary within tolerance")]
    NotUnitary,
    #[error("input matrix must be nonzero")]
    ZeroMatrix,
    #[error("matrix must have full column rank")]
    RankDeficient,
    #[error("operation requires a positive semidefinite frame")]
    FrameNotPsd,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
