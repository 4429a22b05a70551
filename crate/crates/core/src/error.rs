use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("index overflow while building {0}")]
    IndexOverflow(&'static str),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite: {0}")]
    NotSpd(String),
    #[error("factorization breakdown at pivot row {row} (pivot {pivot:e})")]
    Breakdown { row: usize, pivot: f64 },
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("nonpositive diagonal entry {value:e} at row {row}")]
    NonPositiveDiagonal { row: usize, value: f64 },
    #[error("operator is indefinite: {0}")]
    Indefinite(String),
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("symmetric part not positive on iterate (<Ar,r> = {0:e})")]
    SymmetricPartNotPositive(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            got,
        })
    }
}
