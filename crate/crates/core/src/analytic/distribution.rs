//! Exact winding number distribution `P(W)`.

use crate::error::{Error, Result};

use super::beta::beta_uv;

/// Probability mass over `W in {-N, ..., N}`, stored at index `W + N`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindingDistribution {
    n: usize,
    mass: Vec<f64>,
}

impl WindingDistribution {
    /// Wraps a mass vector of length `2N + 1` indexed by `W + N`. Entries must
    /// be nonnegative, vanish off the parity support, and sum to one.
    pub fn from_mass(n: usize, mass: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        if mass.len() != 2 * n + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} mass entries, got {}",
                2 * n + 1,
                mass.len()
            )));
        }
        if mass.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument("mass entries must be finite and nonnegative".into()));
        }
        if mass.iter().enumerate().any(|(i, &p)| i % 2 == 1 && p != 0.0) {
            return Err(Error::InvalidArgument("mass on W with the wrong parity".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("mass sums to {total}, not 1")));
        }
        Ok(Self { n, mass })
    }

    /// Empirical distribution from counts indexed by `W + N`.
    pub fn from_counts(n: usize, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidArgument("no counts".into()));
        }
        Self::from_mass(n, counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `P(W)`; zero outside `[-N, N]`.
    pub fn mass(&self, w: i64) -> f64 {
        let idx = w + self.n as i64;
        if idx < 0 || idx as usize >= self.mass.len() {
            0.0
        } else {
            self.mass[idx as usize]
        }
    }

    /// Raw mass vector indexed by `W + N`.
    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    /// `(W, P(W))` over the parity support `W = -N, -N + 2, ..., N`.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n = self.n as i64;
        (0..=self.n).map(move |m| {
            let w = 2 * m as i64 - n;
            (w, self.mass[(w + n) as usize])
        })
    }

    /// `<W^k>`.
    pub fn moment(&self, k: u32) -> f64 {
        self.support().map(|(w, p)| (w as f64).powi(k as i32) * p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn second_moment(&self) -> f64 {
        self.moment(2)
    }
}

/// Exact `P(W)` for `N x N` fields.
///
/// `P(2m - N)` is the probability that exactly `m` of `N` independent
/// Bernoulli trials succeed, trial `n` with probability `u_n(N, 1)` (the
/// fraction of the `n`-th radial weight inside the unit circle). The mass
/// follows from the usual `O(N^2)` convolution.
pub fn winding_distribution(n: usize) -> Result<WindingDistribution> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    // dp[m] = probability of m successes among the trials seen so far
    let mut dp = vec![0.0; n + 1];
    dp[0] = 1.0;
    for j in 1..=n {
        let (u, v) = beta_uv(j, n, 1.0)?;
        for m in (0..=j).rev() {
            let stay = if m < j { dp[m] * v } else { 0.0 };
            let step = if m > 0 { dp[m - 1] * u } else { 0.0 };
            dp[m] = stay + step;
        }
    }
    let mut mass = vec![0.0; 2 * n + 1];
    for (m, p) in dp.into_iter().enumerate() {
        mass[2 * m] = p;
    }
    Ok(WindingDistribution { n, mass })
}
