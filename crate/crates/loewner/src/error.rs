use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} in column {column} is below the threshold {threshold:e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("scalar moment r_{k} is not real: imaginary part {im:e} against real part {re:e}")]
    NotReal { k: usize, re: f64, im: f64 },
    #[error("degenerate design: numerical rank {rank} below the {needed} monomials of degree {degree}")]
    DegenerateDesign {
        rank: usize,
        needed: usize,
        degree: usize,
    },
    #[error("closed form is only valid for k < n (got k = {k}, n = {n})")]
    OrderTooHigh { k: usize, n: usize },
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
