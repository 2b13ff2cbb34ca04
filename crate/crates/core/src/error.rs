use thiserror::Error;

/// Errors produced by the curvature computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{name} = {value} is outside the supported range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("hypergeometric parameter c = {0} is a nonpositive integer")]
    PoleInLowerParameter(String),

    #[error(
        "quadrature did not converge within {panels} panels \
         (best estimate {best:e}, error estimate {abs_error:e})"
    )]
    NonConvergence {
        best: f64,
        abs_error: f64,
        panels: usize,
    },

    #[error("unknown space selector `{0}`")]
    UnknownSelector(String),

    #[error("empty space list")]
    EmptySpaceList,
}

pub type Result<T> = std::result::Result<T, Error>;
