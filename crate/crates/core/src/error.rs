use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("invalid octal polynomial {0:?}")]
    InvalidOctal(String),
    #[error("polynomial is divisible by x, so x has no multiplicative order modulo it")]
    DivisibleByX,
    #[error("modulus must have degree at least 1")]
    ConstantModulus,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus {0} is not irreducible")]
    NotIrreducible(String),
    #[error("operands belong to different rings")]
    ModulusMismatch,
    #[error("element is not a unit")]
    NotInvertible,
    #[error("exponent search gave up after {0} steps")]
    ExponentSearchExhausted(u64),
    #[error("modulus degree {0} is above the supported maximum for this operation")]
    DegreeTooLarge(usize),
    #[error("invalid modulus {0:?}; expected mp:<prime> or an octal polynomial")]
    InvalidModulus(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("system is singular (no usable pivot in column {column})")]
    SingularSystem { column: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("need m >= 1, got {0}")]
    NoRows(usize),
    #[error("need n >= 2, got {0}")]
    TooFewColumns(usize),
    #[error("need 1 <= r < n, got r = {r}, n = {n}")]
    BadRowParity { r: usize, n: usize },
    #[error("no data symbols left: m(n - r) - s = {0}")]
    NoData(i64),
    #[error("code needs {cells} distinct powers of x but its multiplicative order is only {exponent}")]
    ExponentTooSmall { cells: u64, exponent: u64 },
    #[error("this variant only supports {0}")]
    UnsupportedVariant(String),
    #[error("unknown variant {0:?}; expected c0, c1 or c2")]
    UnknownVariant(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("erasure pattern is not correctable by this code")]
    NotCorrectable,
    #[error("invalid erasure pattern: {0}")]
    InvalidPattern(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("parity layout is not invertible")]
    LayoutNotInvertible,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("malformed codeword file: {0}")]
    Format(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("oracle needs {needed} pattern checks, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("no fast check for this case: {0}")]
    UnsupportedCase(String),
    #[error("profile {0} does not sum to the number of global parities")]
    BadProfile(String),
    #[error("verifier inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReliabilityError {
    #[error("bit error probability must lie in [0, 1), got {0}")]
    BadProbability(f64),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("pages per device ({pages}) is not a multiple of stripes per block ({m})")]
    PagesNotMultiple { pages: u64, m: u64 },
}
