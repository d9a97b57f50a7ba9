use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ssf_core::Error),

    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("evaluation produced a non-finite value")]
    NonFinite,

    #[error("{failed} of {total} checks failed; first: {first}")]
    VerifyFailed {
        failed: usize,
        total: usize,
        first: String,
    },
}

impl CliError {
    /// Process exit status: 1 failed verification, 2 bad input, 3 evaluation
    /// failure, 4 size envelope exceeded.
    pub fn exit_code(&self) -> i32 {
        use ssf_core::Error as E;
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Write { .. } | CliError::NonFinite => 3,
            CliError::Core(e) => match e {
                E::EnvelopeExceeded { .. } => 4,
                E::SpecParse(_)
                | E::EmptyCoefficients
                | E::RealPole { .. }
                | E::InvalidWidth(_)
                | E::ResidueMismatch { .. }
                | E::EmptyKnots
                | E::NonFiniteKnot
                | E::NonDistinctKnots
                | E::NotSquare { .. }
                | E::EmptyMatrix
                | E::NonFiniteMatrix
                | E::NotHermitian { .. }
                | E::DimensionMismatch { .. }
                | E::MatrixFormat(_)
                | E::InvalidTolerance(_)
                | E::InvalidPiecewise(_)
                | E::Json(_)
                | E::Io(_) => 2,
                _ => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
