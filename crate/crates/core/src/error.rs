use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `1/φ_k(r·t)` leaves the double range somewhere on `|t| ≤ 1`.
    #[error("noise-to-bandwidth ratio r = {r} overflows double precision; maximum supported r is {max_r:.6}")]
    Overflow { r: f64, max_r: f64 },

    #[error("exponent {exponent} overflows double precision")]
    ExponentOverflow { exponent: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no observations")]
    EmptyData,

    #[error("target density has zero variance")]
    DegenerateTarget,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("error model `{0}` is not ordinary-smooth")]
    NotOrdinarySmooth(String),

    #[error("error model `{0}` is not supersmooth")]
    NotSupersmooth(String),

    #[error("MISE minimum at the grid boundary h = {h}; increase the grid size (K = {k})")]
    BoundaryMinimum { h: f64, k: usize },

    #[error("cannot standardize: sample has zero spread")]
    ZeroScale,

    #[error("replication {index} failed: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Innermost error, looking through replication wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Replication { source, .. } => source.root(),
            other => other,
        }
    }
}
