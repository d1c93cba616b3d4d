//! Normalized incomplete Beta functions `u_m`, `v_m` and the row-integral
//! function `L_{nml}(q)` of the connected averages.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{beta_int, beta_reg_pair_split};

/// `(u_m(N, q^2), v_m(N, q^2))`: the radial weight `rho^(2m-1) (1 + rho^2)^-(N+1)`
/// inside and outside radius `q`, normalized by `B(m, N - m + 1) / 2`.
///
/// `u = I_{q^2/(1+q^2)}(m, N - m + 1)` and `u + v = 1`. `qsq` may be infinite.
pub fn beta_uv(m: usize, n: usize, qsq: f64) -> Result<(f64, f64)> {
    if m < 1 || m > n {
        return Err(Error::InvalidArgument(format!(
            "beta_uv index m = {m} outside 1..={n}"
        )));
    }
    if !(qsq >= 0.0) {
        return Err(Error::InvalidArgument(format!("q^2 = {qsq} must be nonnegative")));
    }
    if qsq.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let x = qsq / (1.0 + qsq);
    let y = 1.0 / (1.0 + qsq);
    beta_reg_pair_split(m as f64, (n - m + 1) as f64, x, y)
}

/// `L_{nml}(q) = (-1)^(m-n) pi q^-(m-n+1) B(m, N-m+1) * { u_m(N, q^2) if m >= n; -v_m(N, q^2) otherwise }`.
///
/// `row` and `col` are the powers `n`, `m` (1-based) of `z` and `z*` in the
/// integrand; `q` is the resolvent argument.
pub fn l_function(row: usize, col: usize, n: usize, q: f64) -> Result<f64> {
    if row < 1 || row > n || col < 1 || col > n {
        return Err(Error::InvalidArgument(format!(
            "L-function indices ({row}, {col}) outside 1..={n}"
        )));
    }
    if q == 0.0 && col >= row {
        return Err(Error::InvalidArgument(
            "L-function pole at q = 0 (use the q = 0 limit of the average instead)".into(),
        ));
    }
    let shift = col as i32 - row as i32;
    let sign = if shift.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (u, v) = beta_uv(col, n, q * q)?;
    let radial = if col >= row { u } else { -v };
    Ok(sign * PI * q.powi(-(shift + 1)) * beta_int(col, n) * radial)
}

/// `L_{nml}(q) / (pi B(m, N - m + 1))`: the same function with its column
/// normalization stripped, which cancels against `c_N` in the k-point average.
pub(crate) fn l_normalized(row: usize, col: usize, n: usize, q: f64) -> Result<f64> {
    let shift = col as i32 - row as i32;
    let sign = if shift.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (u, v) = beta_uv(col, n, q * q)?;
    let radial = if col >= row { u } else { -v };
    Ok(sign * q.powi(-(shift + 1)) * radial)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(2 / B) * int_0^q rho^(2m-1) (1 + rho^2)^-(N+1) d rho` by composite Simpson.
    fn u_quadrature(m: usize, n: usize, q: f64) -> f64 {
        let steps = 20_000;
        let h = q / steps as f64;
        let f = |r: f64| r.powi(2 * m as i32 - 1) / (1.0 + r * r).powi(n as i32 + 1);
        let mut s = f(0.0) + f(q);
        for i in 1..steps {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        2.0 * s * h / 3.0 / beta_int(m, n)
    }

    #[test]
    fn u_at_unit_radius() {
        let (u, v) = beta_uv(1, 1, 1.0).unwrap();
        assert!((u - 0.5).abs() < 1e-15 && (v - 0.5).abs() < 1e-15);
        assert!((u_quadrature(1, 1, 1.0) - 0.5).abs() < 1e-12);

        let (u, _) = beta_uv(1, 2, 1.0).unwrap();
        assert!((u - 0.75).abs() < 1e-15);
        assert!((u_quadrature(1, 2, 1.0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn binomial_tail_identity_at_unit_radius() {
        // u_m(N, 1) = 2^-N sum_{j >= m} C(N, j)
        for n in 1..=40usize {
            for m in 1..=n {
                let tail: f64 = (m..=n).map(|j| crate::special::binomial(n, j)).sum::<f64>()
                    / 2f64.powi(n as i32);
                let (u, _) = beta_uv(m, n, 1.0).unwrap();
                assert!((u - tail).abs() <= 1e-12 * tail, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn matches_quadrature_off_unit_radius() {
        for &(m, n, q) in &[(1, 3, 0.4), (2, 3, 1.7), (3, 5, 0.9), (5, 6, 2.5)] {
            let (u, _) = beta_uv(m, n, q * q).unwrap();
            assert!((u - u_quadrature(m, n, q)).abs() < 1e-11, "m={m} n={n} q={q}");
        }
    }

    #[test]
    fn limits_and_errors() {
        assert_eq!(beta_uv(2, 4, 0.0).unwrap(), (0.0, 1.0));
        assert_eq!(beta_uv(2, 4, f64::INFINITY).unwrap(), (1.0, 0.0));
        assert!(beta_uv(0, 4, 1.0).is_err());
        assert!(beta_uv(5, 4, 1.0).is_err());
        assert!(beta_uv(1, 4, -1.0).is_err());
    }

    #[test]
    fn l_function_values() {
        assert!((l_function(1, 1, 1, 1.0).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!(l_function(1, 1, 1, 0.0).is_err());
        // below the diagonal q = 0 is regular: L_{21}(0) = pi * B(1, N) * (-1)^(-1) * (-v) = pi/N
        let n = 3;
        assert!((l_function(2, 1, n, 0.0).unwrap() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn l_function_large_q_limit() {
        let q = 1e4;
        for n in 1..=5 {
            for row in 1..=n {
                for col in 1..=n {
                    let lim = q * l_function(row, col, n, q).unwrap();
                    if col > row {
                        // decays like q^-(col - row), too slowly for 1e-6 at q = 1e4
                        let bound = PI * beta_int(col, n) * q.powi(row as i32 - col as i32);
                        assert!(lim.abs() <= bound * (1.0 + 1e-12), "n={n} ({row},{col}) {lim}");
                    } else {
                        let expected = if row == col { PI * beta_int(col, n) } else { 0.0 };
                        assert!((lim - expected).abs() < 1e-6, "n={n} ({row},{col}) {lim}");
                    }
                }
            }
        }
    }

    #[test]
    fn normalized_matches_raw() {
        for &q in &[-2.0, -0.3, 0.7, 5.0] {
            for row in 1..=4 {
                for col in 1..=4 {
                    let raw = l_function(row, col, 4, q).unwrap();
                    let norm = l_normalized(row, col, 4, q).unwrap() * PI * beta_int(col, 4);
                    assert!((raw - norm).abs() <= 1e-14 * raw.abs().max(1.0));
                }
            }
        }
    }
}
