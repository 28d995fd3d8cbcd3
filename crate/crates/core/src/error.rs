use thiserror::Error;

/// Errors raised by the library. Variants carry enough context to name the
/// violated condition without re-running the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator table {0} is not a bijection")]
    NonBijective(usize),
    #[error("invalid action description: {0}")]
    InvalidAction(String),
    #[error("invalid system description: {0}")]
    InvalidSystem(String),
    #[error("point is not a point of the system: {0}")]
    InvalidPoint(String),
    #[error("resolution overflow: {0}")]
    ResolutionOverflow(String),
    #[error("size overflow: {0}")]
    SizeOverflow(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("function cannot be evaluated: {0}")]
    NonEvaluable(String),
    #[error("no chain: the chain-recurrent set is empty")]
    NoChain,
    #[error("map is not invertible on this descriptor: {0}")]
    NonInvertible(String),
    #[error("determinant vanishes; the fixed-point group is infinite")]
    Infinite,
    #[error("group ring element failed the invertibility precheck (min |f^| = {0:e})")]
    NotInvertible(f64),
    #[error("invertibility precheck inconclusive (min |f^| = {0:e} below margin)")]
    Inconclusive(f64),
    #[error("context too large: {0}")]
    ContextOverflow(String),
    #[error("certificate does not refer to this context: {0}")]
    StaleContext(String),
    #[error("no positive rational solution with denominator <= {0}")]
    NoPositiveRationalSolution(u64),
    #[error("point is not fixed by the map")]
    NotFixed,
    #[error("eigenvalue {0} lies within the spectral gap around 1/2")]
    SpectralGap(f64),
    #[error("||pq|| = {norm:e} exceeds the cap {cap:e}")]
    DeltaExceeded { norm: f64, cap: f64 },
    #[error("orthogonalization cascade failed: {0}")]
    CascadeExceeded(String),
    #[error("matrix is singular (smallest singular value {0:e})")]
    Singular(f64),
    #[error("trace mismatch for family member {0}")]
    TraceMismatch(usize),
    #[error("threshold exceeded: {0}")]
    ThresholdExceeded(String),
    #[error("placement error: {0}")]
    PlacementError(String),
    #[error("hypothesis error: {0}")]
    HypothesisError(String),
    #[error("numerical bound violated: {0}")]
    BoundViolated(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
