//! Winding-number statistics of the parametric chiral unitary random matrix
//! ensemble `K(p) = K1 cos p + K2 sin p`, with `K1`, `K2` independent complex
//! Ginibre matrices.
//!
//! * [`ensemble`]: sampling, the field, the chiral Hamiltonian, and the
//!   spherical-ensemble joint density.
//! * [`spectral`]: eigenvalues, winding numbers by counting and by contour
//!   phase tracking, and the winding number density.
//! * [`analytic`]: exact distribution, moments, connected averages and
//!   correlation functions, unfolding limits.
//! * [`montecarlo`]: seeded, parallel ensemble estimators with error bars.

pub mod analytic;
pub mod ensemble;
pub mod error;
pub mod matrix;
pub mod montecarlo;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{ComplexMat, C64};
