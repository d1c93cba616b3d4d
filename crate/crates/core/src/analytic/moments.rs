//! Moments of the winding number and the Gaussian approximation to `P(W)`.

use std::f64::consts::{PI, TAU};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest `N` accepted by [`moment_quadrature`].
pub const MAX_QUADRATURE_N: usize = 1000;

/// Below this `N` the double-factorial ratio is accumulated as a product.
const PRODUCT_FORM_MAX_N: usize = 1000;

/// `<W^2> = (2N - 1)!! / (2N - 2)!!`, asymptotically `2 sqrt(N / pi)`.
pub fn variance_analytic(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n <= PRODUCT_FORM_MAX_N {
        Ok((1..n).map(|j| (2 * j + 1) as f64 / (2 * j) as f64).product())
    } else {
        let nf = n as f64;
        Ok(2.0 * (ln_gamma(nf + 0.5) - ln_gamma(nf)).exp() / PI.sqrt())
    }
}

/// `<W^2> = (1 / 2 pi) int_0^{2 pi} (1 - cos^{2N} phi) / (1 - cos^2 phi) d phi`
/// by the trapezoid rule.
///
/// The integrand equals `sum_{j < N} cos^{2j} phi`, a trigonometric polynomial
/// of degree `2N - 2`, so `4N + 16` uniform nodes integrate it exactly up to
/// rounding. It is evaluated as `-expm1(N ln(1 - sin^2)) / sin^2`, with the
/// value `N` at the removable points `phi in {0, pi}`.
pub fn moment_quadrature(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n > MAX_QUADRATURE_N {
        return Err(Error::UnsupportedSize {
            what: "moment quadrature",
            size: n,
            max: MAX_QUADRATURE_N,
        });
    }
    let nf = n as f64;
    let m = 4 * n + 16;
    let h = TAU / m as f64;
    let sum: f64 = (0..m)
        .map(|j| {
            let s2 = (j as f64 * h).sin().powi(2);
            if s2 == 0.0 {
                nf
            } else {
                -(nf * (-s2).ln_1p()).exp_m1() / s2
            }
        })
        .sum();
    Ok(sum / m as f64)
}

/// `P(W) / P(0) ~ exp(-(1/4) sqrt(pi / N) W^2)`: a fit to the exact
/// distribution at large `N`, not an identity.
pub fn gaussian_approx(n: usize, w: i64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if w.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!("|W| = {} exceeds N = {n}", w.abs())));
    }
    if (w + n as i64).rem_euclid(2) != 0 {
        return Err(Error::InvalidArgument(format!(
            "W = {w} has the wrong parity for N = {n}"
        )));
    }
    let wf = w as f64;
    Ok((-0.25 * (PI / n as f64).sqrt() * wf * wf).exp())
}
