//! Exact multivariate polynomial arithmetic and the configuration-space
//! Poisson bracket built on it.

mod bracket;
pub mod exchange;
pub mod linalg;
mod poly;
mod scalar;
mod theta;

use thiserror::Error;

pub use bracket::{nested_bracket, poisson_bracket_config};
pub use poly::{Exponents, Polynomial};
pub use scalar::{rational_sqrt, Coeff, Rational, Scalar, ScalarMode};
pub use theta::{ThetaMatrix, ThetaRecord};

/// Per-variable exponent cap; anything larger is treated as a runaway
/// configuration.
pub const MAX_DEGREE: u32 = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("degree {degree} in variable {var} exceeds the cap of {MAX_DEGREE}")]
    DegreeOverflow { var: usize, degree: u32 },
    #[error("scalar modes cannot be mixed")]
    ModeMismatch,
    #[error("invalid theta matrix: {0}")]
    InvalidTheta(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("variables beyond index {nvars} still occur")]
    VariableInUse { nvars: usize },
    #[error("singular linear system (det = {det})")]
    Singular { det: f64 },
}

/// Evaluate a polynomial at a point (free-function form).
pub fn poly_eval<C: Coeff>(p: &Polynomial<C>, point: &[C]) -> Result<C, PolyError> {
    p.eval(point)
}

/// Partial derivative (free-function form).
pub fn poly_diff<C: Coeff>(p: &Polynomial<C>, var: usize) -> Result<Polynomial<C>, PolyError> {
    p.diff(var)
}
