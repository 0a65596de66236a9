use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tensor order must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("tensor dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("a tensor of order {order} and dimension {dim} exceeds the size guard of {guard} entries")]
    SizeGuard { order: usize, dim: usize, guard: usize },
    #[error("expected {expected} entries, found {found}")]
    DataLength { expected: usize, found: usize },
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("tensor is not symmetric (max deviation {max_deviation:.3e} > {tol:.0e}); symmetrize it explicitly")]
    NotSymmetric { max_deviation: f64, tol: f64 },
    #[error("index subset must be nonempty")]
    EmptySubset,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("tensors of the triple disagree in shape: {0}")]
    ShapeMismatch(String),
    #[error("generator matrix H is rank deficient (smallest singular value {smallest:.3e})")]
    RankDeficient { smallest: f64 },
    #[error("the reformulation requires C = -I")]
    ReformulationUnsupported,
    #[error("operation requires {expected}, but C is not {expected}")]
    VariantMismatch { expected: &'static str },
    #[error("operation requires a nonnegative-orthant problem")]
    ConeUnsupported,
    #[error("vector x is zero")]
    ZeroVector,
    #[error("u is zero; no eigenvector can be recovered")]
    ZeroU,
    #[error("varphi0 = {value:.6e} <= 0 has no real (m-1)-th root for even m-1")]
    NegativePower { value: f64 },
    #[error("eigenvalue must be positive, got {0}")]
    NonpositiveLambda(f64),
    #[error("eigenpair does not pass verification")]
    UnverifiedPair,
    #[error("A x^m + y^T y^[m-1] = {0:.3e} is not positive; A is not copositive along this pair")]
    NotCopositiveAlongPair(f64),
    #[error("scaling factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("count bound n*m^n overflows for m = {m}, n = {n}")]
    CountOverflow { m: usize, n: usize },
    #[error("univariate polynomial is identically zero")]
    DegeneratePolynomial,
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("invalid start point: {0}")]
    InvalidStart(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Document(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
