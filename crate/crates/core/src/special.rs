//! Beta-function helpers and the regularized incomplete Beta function.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 20_000;
const CF_TINY: f64 = 1e-300;

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `B(m, n - m + 1) = 1 / (n * binom(n - 1, m - 1))` for integers `1 <= m <= n`.
pub fn beta_int(m: usize, n: usize) -> f64 {
    debug_assert!(1 <= m && m <= n);
    if n <= 50 {
        1.0 / (n as f64 * binomial(n - 1, m - 1))
    } else {
        ln_beta(m as f64, (n - m + 1) as f64).exp()
    }
}

/// Binomial coefficient as `f64`; exact while the result fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    if acc < 9.0e15 {
        acc.round()
    } else {
        acc
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Both tails of the regularized incomplete Beta function,
/// `(I_x(a, b), 1 - I_x(a, b))`, each computed directly from the continued
/// fraction on the side where it converges, so the smaller one keeps full
/// relative precision.
pub fn beta_reg_pair(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    beta_reg_pair_split(a, b, x, 1.0 - x)
}

/// As [`beta_reg_pair`] with the complement `y = 1 - x` supplied separately,
/// for callers that know it more accurately than `1.0 - x`.
pub fn beta_reg_pair_split(a: f64, b: f64, x: f64, y: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "incomplete Beta needs a, b > 0 (got a = {a}, b = {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "incomplete Beta argument {x} outside [0, 1]"
        )));
    }
    if x == 0.0 || y == 1.0 {
        return Ok((0.0, 1.0));
    }
    if x == 1.0 || y == 0.0 {
        return Ok((1.0, 0.0));
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = lentz(a, b, x, y)?;
        Ok((lower, 1.0 - lower))
    } else {
        let upper = lentz(b, a, y, x)?;
        Ok((1.0 - upper, upper))
    }
}

/// Stirling remainder `ln Gamma(x) - (x - 1/2) ln x + x - ln(2 pi) / 2`, for `x >= 20`.
fn stirling_remainder(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / x
}

/// `ln(x^a (1 - x)^b / B(a, b))`. For large `a`, `b` the leading Stirling terms
/// are combined analytically so no large logarithms cancel.
fn ln_power_prefix(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if a.min(b) < 20.0 {
        return a * x.ln() + b * y.ln() - ln_beta(a, b);
    }
    let s = a + b;
    let excess = x * b - y * a;
    a * (excess / a).ln_1p() + b * (-excess / b).ln_1p() + 0.5 * (a * b / s).ln()
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - (stirling_remainder(a) + stirling_remainder(b) - stirling_remainder(s))
}

/// `I_x(a, b)` via the modified Lentz evaluation of the standard continued
/// fraction; accurate for `x < (a + 1) / (a + b + 2)`.
fn lentz(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    let ln_prefix = ln_power_prefix(a, b, x, y);
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok((ln_prefix.exp() / a) * h);
        }
    }
    Err(Error::InvalidArgument(format!(
        "incomplete Beta continued fraction did not converge (a = {a}, b = {b}, x = {x})"
    )))
}
