use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {0:e} is beyond the representable range")]
    Overflow(f64),

    #[error("capability missing: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "Sobolev class undecidable: tail index {p_tail:.6} is within {index_tol:e} of dimension {dim}"
    )]
    BorderlineSobolev {
        p_tail: f64,
        dim: usize,
        index_tol: f64,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("incompatible shapes: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("solver did not converge after {iterations} iterations (last lambda {last:.10e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },
}
