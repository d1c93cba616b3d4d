use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is ill-conditioned (condition estimate {condition:.3e} exceeds {threshold:.3e})")]
    IllConditioned { condition: f64, threshold: f64 },

    /// `det K(p)` vanished to working precision; the sample grazes a gap closing.
    #[error("K(p) is singular at p = {p}")]
    SingularField { p: f64 },

    #[error(
        "eigenvalue iteration did not converge after {iterations} sweeps \
         ({} of {dim} eigenvalues deflated)", partial.len()
    )]
    NoConvergence {
        iterations: usize,
        dim: usize,
        partial: Vec<Complex64>,
    },

    #[error("contour refinement limit {limit} exceeded near p = {p}")]
    ContourRefinement { limit: usize, p: f64 },

    #[error("size {size} exceeds supported maximum {max} for {what}")]
    UnsupportedSize {
        what: &'static str,
        size: usize,
        max: usize,
    },

    /// Two-point function requested at coincident parameters (mod pi).
    #[error("coincident parameters (mod pi); the continuous limit of C2 is {limit}")]
    CoincidentPoints { limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
