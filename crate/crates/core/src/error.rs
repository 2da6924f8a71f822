use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precision mismatch: expected {expected} mantissa bits, found {found}")]
    PrecisionMismatch { expected: u32, found: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: String, iterations: usize },

    #[error("degenerate least-squares fit: {0}")]
    DegenerateFit(String),

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("Kraus operators violate completeness (deviation {deviation:e})")]
    IncompleteChannel { deviation: f64 },

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("dense oracle limited to {limit} sites, requested {requested}")]
    OracleLimit { limit: usize, requested: usize },

    #[error("bond {bond} needs dimension {required}, above the cap of {cap}")]
    BondCapExceeded { bond: usize, required: usize, cap: usize },

    #[error("Krylov basis lost orthogonality (overlap {overlap:e})")]
    LostOrthogonality { overlap: f64 },

    #[error("{0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::OracleLimit { .. }
            | Error::NonUnitary { .. }
            | Error::IncompleteChannel { .. }
            | Error::PrecisionMismatch { .. }
            | Error::DimensionMismatch(_) => 2,
            Error::OutOfScope(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
