use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("non-finite sample at node (i_t = {i_t}, i_x = {i_x})")]
    NonFinite { i_t: usize, i_x: usize },

    #[error("grid mismatch: {0}")]
    SpecMismatch(String),

    #[error("star series did not converge at order {order}; term norms {term_norms:?}")]
    SeriesDiverged { order: usize, term_norms: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing temporal information: {0}")]
    MissingEnergy(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
