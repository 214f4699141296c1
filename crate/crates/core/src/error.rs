use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("polynomial {0} is reducible over Q")]
    Reducible(String),

    #[error("invalid precision {0}; must be positive")]
    InvalidPrecision(f64),

    #[error("precision cap reached: {0}")]
    PrecisionExhausted(String),

    #[error("root certification failed: {0}")]
    Certification(String),

    #[error("root selector {index} out of range for degree {degree}")]
    RootIndex { index: usize, degree: usize },

    #[error("classification requires a real root greater than 1, got {0}")]
    NotRealAboveOne(String),

    #[error("undecidable modulus comparison: {0}")]
    Undecidable(String),

    #[error("spectrum member has modulus <= 1: {0}")]
    NotExpanding(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zero matrix has no Perron-Frobenius eigenvalue")]
    ZeroMatrix,

    #[error("matrix entries must be nonnegative")]
    NegativeEntry,

    #[error("no integer matrix M with QV = VM: {0}")]
    NotInvariant(String),

    #[error("frame generators are not free: {0}")]
    DependentFrame(String),

    #[error("not enough points: {0}")]
    TooFewPoints(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no point of the set within R of waypoint {0}")]
    SnapFailure(String),

    #[error("inflation inclusion fails: {0}")]
    InflationFails(String),

    #[error("disjointness violated: {0}")]
    Overlap(String),

    #[error("digit set outside the module frame: {0}")]
    NotInModule(String),

    #[error("no generating cluster found within search bounds")]
    NoGeneratingCluster,

    #[error("region not covered; covered sub-region {0}")]
    NotCovered(String),

    #[error("contraction failure: {0}")]
    NotContracting(String),

    #[error("iteration cap reached: {0}")]
    IterationCap(String),

    #[error("tile map selects an empty digit set: {0}")]
    BadTileMap(String),

    #[error("marker matching failed: {0}")]
    MarkerMismatch(String),

    #[error("β-system is not Parry within the iteration budget: {0}")]
    NotParry(String),

    #[error("inconsistent gap parameters: {0}")]
    InconsistentGaps(String),

    #[error("unbounded region or window: {0}")]
    Unbounded(String),

    #[error("singular splitting matrix")]
    Singular,

    #[error("address residual is not bounded: {0}")]
    NotMeyer(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("{0}")]
    Usage(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that describe the data rather than the invocation.
    pub fn is_data_error(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. }
                | Error::Usage(_)
                | Error::Io(_)
                | Error::Unsupported(_)
                | Error::InvalidPolynomial(_)
                | Error::Reducible(_)
                | Error::RootIndex { .. }
                | Error::InvalidPrecision(_)
                | Error::Dimension(_)
        )
    }
}
