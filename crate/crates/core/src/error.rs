use crate::permutations::TupleClass;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("entry {value} at flat position {index} is outside [0, 1]")]
    EntryOutOfRange { index: usize, value: f64 },
    #[error("expected {expected} values for n = {n}, dims = {dims}, found {found}")]
    Shape { n: usize, dims: usize, expected: usize, found: usize },
    #[error("side length must be positive")]
    EmptyArray,
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("map is not a permutation of n = {n} elements")]
    NotBijection { n: usize },
    #[error("3-cycle move needs three distinct indices, got a {0:?} tuple")]
    InvalidMove(TupleClass),
    #[error("{what} needs n >= {min}, got n = {n}")]
    TooSmall { what: &'static str, n: usize, min: usize },
    #[error("exact enumeration of {what} is capped at n <= {cap}, got n = {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("{0} needs a {1}-D array")]
    WrongDims(crate::statistics::StatKind, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
