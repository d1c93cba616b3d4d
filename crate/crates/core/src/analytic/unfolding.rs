//! Two-point function on the scale `psi = N^alpha p`.

use crate::error::{Error, Result};

use super::correlators::c2;

/// Tolerance within which `alpha` is treated as exactly `1/2`.
pub const CRITICAL_ALPHA_TOLERANCE: f64 = 1e-12;

/// Rescaled two-point values along a grid of separations `psi_1 - psi_2`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnfoldedCurve {
    pub alpha: f64,
    pub psi_values: Vec<f64>,
    pub values: Vec<f64>,
}

impl UnfoldedCurve {
    /// The large-`N` limit `f_2^(alpha)` at each separation.
    pub fn limit(alpha: f64, psi_values: &[f64]) -> Result<Self> {
        let values = psi_values
            .iter()
            .map(|&d| unfolded_f2(alpha, d, 0.0))
            .collect::<Result<_>>()?;
        Ok(Self {
            alpha,
            psi_values: psi_values.to_vec(),
            values,
        })
    }

    /// `N^{-2 alpha} C_2` at each separation for finite `N`.
    pub fn rescaled(alpha: f64, n: usize, psi_values: &[f64]) -> Result<Self> {
        let values = psi_values
            .iter()
            .map(|&d| rescaled_c2(alpha, n, d, 0.0))
            .collect::<Result<_>>()?;
        Ok(Self {
            alpha,
            psi_values: psi_values.to_vec(),
            values,
        })
    }

    /// Largest pointwise `|self - other|`; the curves must share a grid.
    pub fn max_deviation(&self, other: &UnfoldedCurve) -> f64 {
        assert_eq!(self.psi_values, other.psi_values, "curves on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    Ok(())
}

/// Limit of `N^{-2 alpha} C_2(psi_1 / N^alpha, psi_2 / N^alpha)` as `N -> inf`:
///
/// * `-1 / d^2` for `alpha < 1/2`,
/// * `-(1 - exp(-d^2)) / d^2` for `alpha = 1/2`,
/// * `0` for `alpha > 1/2`,
///
/// with `d = psi_1 - psi_2`.
pub fn unfolded_f2(alpha: f64, psi1: f64, psi2: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let d = psi1 - psi2;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "unfolded limit needs distinct finite psi (got {psi1}, {psi2})"
        )));
    }
    let d2 = d * d;
    Ok(if (alpha - 0.5).abs() <= CRITICAL_ALPHA_TOLERANCE {
        (-d2).exp_m1() / d2
    } else if alpha < 0.5 {
        -1.0 / d2
    } else {
        0.0
    })
}

/// `N^{-2 alpha} C_2(psi_1 / N^alpha, psi_2 / N^alpha)`.
pub fn rescaled_c2(alpha: f64, n: usize, psi1: f64, psi2: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let scale = (n as f64).powf(alpha);
    Ok(c2(psi1 / scale, psi2 / scale, n)? / (scale * scale))
}
