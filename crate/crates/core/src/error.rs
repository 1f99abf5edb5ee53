use thiserror::Error;

/// Errors raised by states, models, integrators and diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate denominator {value:e} in {context} (step size too large for the dissipation rate?)")]
    DegenerateDenominator { context: &'static str, value: f64 },

    #[error("newton iteration did not converge after {iters} iterations (residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("singular jacobian in newton iteration")]
    SingularJacobian,

    #[error("no real root for the implicit action update (discriminant {0:e})")]
    ComplexRoot(f64),

    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("jacobian perturbation of coordinate {coord} ({sign}) failed: {source}")]
    Perturbation {
        coord: usize,
        sign: char,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
