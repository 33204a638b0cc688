use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("entry ({row}, {col}) outside {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("enumeration of {rows}x{cols} matrices exceeds the 2^24 cap")]
    EnumerationTooLarge { rows: usize, cols: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("trial count must be positive")]
    ZeroTrials,
    #[error("dimension {0} too large for simulation (max 12)")]
    DimensionTooLarge(usize),
    #[error("jacobi symbol needs an odd positive modulus, got {0}")]
    BadJacobiModulus(i64),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("{0} is out of range: {1}")]
    OutOfRange(i64, &'static str),
    #[error("could not factor {0}: composite cofactor {1}")]
    Unfactored(u64, u64),
    #[error("{q} divides the conductor of the character")]
    DividesConductor { q: i64 },
    #[error("unsupported l = {0}: need |l| prime with |l| = 3 mod 4, or l = -1")]
    UnsupportedL(i64),
    #[error("invalid form ({a}, {b}, {c}): {reason}")]
    InvalidForm {
        a: i64,
        b: i64,
        c: i64,
        reason: &'static str,
    },
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("discriminant {0} is not fundamental")]
    NotFundamental(i64),
    #[error("{0} is a perfect square")]
    PerfectSquare(u64),
    #[error("m must be nonzero")]
    ZeroTarget,
    #[error("excluded input: {0}")]
    Excluded(&'static str),
    #[error("triple ({a}, {b}, {c}) is not admissible: {condition}")]
    Inadmissible {
        a: i64,
        b: i64,
        c: i64,
        condition: String,
    },
    #[error("no rational point on x^2 - ({a}) y^2 = ({b}) z^2")]
    NoConicSolution { a: i64, b: i64 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("records mix l = {0} and l = {1}")]
    MixedL(i64, i64),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("corrupted checkpoint: {0}")]
    CorruptCheckpoint(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
