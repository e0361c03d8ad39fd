use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("box size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("generator index {i} out of range for box size {k}")]
    GeneratorIndex { k: usize, i: usize },
    #[error("cannot glue {m} strands between disks with {a} and {b} boundary points")]
    InvalidGlue { m: usize, a: usize, b: usize },
    #[error("box size {k} exceeds the enumeration limit {limit}")]
    BasisLimit { k: usize, limit: usize },
    #[error("outside validity domain: {0}")]
    Domain(String),
    #[error("element is zero")]
    ZeroElement,
    #[error("degenerate square relation: dt + d + t = 0")]
    DegenerateSquare,
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error("invalid braiding: {0}")]
    InvalidBraiding(String),
    #[error("parameter vector has length {got}, layout expects {expected}")]
    LayoutMismatch { expected: usize, got: usize },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
