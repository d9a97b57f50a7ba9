use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient list is empty")]
    EmptyCoefficients,
    #[error("rational pole {re}+{im}i is not off the real axis")]
    RealPole { re: f64, im: f64 },
    #[error("gaussian width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("{poles} poles but {residues} residues")]
    ResidueMismatch { poles: usize, residues: usize },
    #[error("derivative of order {requested} requested, function supports up to {max}")]
    DerivativeUnavailable { requested: usize, max: usize },
    #[error("cannot parse function spec: {0}")]
    SpecParse(String),

    #[error("knot list is empty")]
    EmptyKnots,
    #[error("knots must be finite")]
    NonFiniteKnot,
    #[error("base knots must be pairwise distinct")]
    NonDistinctKnots,
    #[error("knot index {index} out of range for {len} knots")]
    KnotIndex { index: usize, len: usize },
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("all knots coincide; at least two distinct values are required")]
    AllKnotsEqual,
    #[error("order must be at least {min}, got {order}")]
    OrderTooSmall { order: usize, min: usize },

    #[error("invalid piecewise polynomial: {0}")]
    InvalidPiecewise(String),
    #[error("piecewise polynomial has a nonzero {side} tail {value}")]
    NonzeroTail { side: &'static str, value: f64 },
    #[error(
        "cannot integrate a nonzero tail against a derivative without a known limit at infinity"
    )]
    NonDecayingTail,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has dimension zero")]
    EmptyMatrix,
    #[error("matrix has non-finite entries")]
    NonFiniteMatrix,
    #[error("matrix deviates from its adjoint by {deviation:e} (tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix record malformed: {0}")]
    MatrixFormat(String),
    #[error("eigensolver did not converge")]
    EigenFailure,
    #[error("cluster tolerance must be nonnegative and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("{atoms} atoms exceed the envelope of {limit}")]
    EnvelopeExceeded { atoms: f64, limit: f64 },
    #[error("interval [{a}, {b}] does not contain the spectra (hull [{c}, {d}])")]
    IntervalTooSmall { a: f64, b: f64, c: f64, d: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
