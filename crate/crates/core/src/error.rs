use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} limit exceeded: {required} required, limit is {limit}")]
    LimitExceeded {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("the polyhedron is empty")]
    InfeasibleInput,

    #[error("the polyhedron is unbounded")]
    UnboundedInput,

    #[error("query point violates row {row} of the system")]
    PointNotInPolyhedron { row: usize },

    #[error("invalid reduction parameter k = {0}; k must be at least 2")]
    InvalidK(i64),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{what} too large: {size} exceeds {max}")]
    TooLarge {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("a Hilbert basis query needs at least one generator")]
    EmptyGenerators,

    #[error("closure system lacks the rows 1^T x <= 1 and -1^T x <= -1")]
    MissingCardinalityRows,

    #[error("closure system lacks the nonnegativity row for variable {0}")]
    MissingNonnegativityRow(usize),
}

impl Error {
    pub(crate) fn limit(what: &'static str, required: u128, limit: u128) -> Self {
        Error::LimitExceeded {
            what,
            required,
            limit,
        }
    }
}
