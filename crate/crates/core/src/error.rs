use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {t} attaches to {target}, expected a target in [1, {t}]")]
    InvalidTarget { t: usize, target: usize },

    #[error("vertex {v} is not in a graph with {n} vertices")]
    UnknownVertex { v: usize, n: usize },

    #[error("cannot collapse {n} vertices into blocks of {m}")]
    BlockSize { n: usize, m: usize },

    #[error("graph too large: {0} vertices exceeds the u32 vertex id range")]
    TooLarge(usize),

    #[error("edge-list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("window too small: {0}")]
    Window(String),

    #[error("enumeration of n={n} exceeds the configured cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("tail tolerance {tol:e} unreachable for column {k} with lmax={lmax}")]
    Tolerance { k: usize, lmax: usize, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
