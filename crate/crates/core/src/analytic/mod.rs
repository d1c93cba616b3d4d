//! Closed-form results: incomplete Beta building blocks, the `L` function,
//! connected averages over the spherical ensemble, correlation functions,
//! unfolding limits, the exact winding number distribution and its moments.

mod beta;
mod connected;
mod correlators;
mod distribution;
mod moments;
mod unfolding;

pub use beta::{beta_uv, l_function};
pub use connected::{k_point_connected, n_point_connected, MAX_PERMUTATION_DIM};
pub use correlators::{
    c1, c2, ck_assemble, ck_translated, mean_level_spacing, MAX_ASSEMBLY_ORDER,
    MIN_ANGLE_SEPARATION,
};
pub use distribution::{winding_distribution, WindingDistribution};
pub use moments::{gaussian_approx, moment_quadrature, variance_analytic, MAX_QUADRATURE_N};
pub use unfolding::{rescaled_c2, unfolded_f2, UnfoldedCurve, CRITICAL_ALPHA_TOLERANCE};
