use thiserror::Error;

/// Errors produced by the switch-function routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {expected}")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("function `{0}` has no antiderivative; use pair_numeric instead")]
    MissingAntiderivative(String),

    #[error("antiderivative of `{label}` does not vanish at 0 (F(0) = {value})")]
    AntiderivativeOffset { label: String, value: f64 },

    #[error(
        "quadrature did not converge after {subintervals} subintervals \
         (estimate {estimate}, error bound {error_bound})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error_bound: f64,
        subintervals: usize,
    },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("switch points must be ordered in [0, 1]: {0:?}")]
    Unordered(Vec<f64>),

    #[error("reciprocal order {order} is below polynomial degree {degree}")]
    ReciprocalOrder { order: usize, degree: usize },

    #[error("series valid through x^{available}, but x^{requested} was requested")]
    InsufficientOrder { available: usize, requested: usize },

    #[error("suspected multiple root near {near} (Sturm chain ends in degree {gcd_degree})")]
    MultipleRoot { near: f64, gcd_degree: usize },

    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("singular matrix (pivot {pivot} in column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no sign change of the balance function found; scan table {table:?}")]
    NoSignChange { table: Vec<(f64, f64)> },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
