use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected a {expected}x{expected} matrix, got {found}x{found}")]
    DimensionViolation { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1..=64)")]
    UnsupportedDimension(usize),

    #[error("matrix data has {found} entries, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |M - M*| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not unitary: max |U*U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("negative eigenvalue {value:e} below tolerance -{tol:e}")]
    NegativeEigenvalue { value: f64, tol: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the domain of `{function}`")]
    DomainViolation { function: String, eigenvalue: f64 },

    #[error("invalid exponent {0}: must be finite and non-negative")]
    InvalidExponent(f64),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("AM-GM input {index} is not positive: {value}")]
    NonPositiveInput { index: usize, value: f64 },

    #[error("cycle index {value} at position {position} is not 0 or 1")]
    InvalidIndex { position: usize, value: u8 },

    #[error("golden mismatch: got {re} + {im}i, expected {golden_re} + {golden_im}i")]
    GoldenMismatch {
        re: f64,
        im: f64,
        golden_re: f64,
        golden_im: f64,
    },

    #[error("malformed matrix file: {0}")]
    Format(String),
}
