//! Reference computations that do not go through the library's own
//! special-function or recursion code.

#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

/// `C(n, k)` by exact integer arithmetic.
pub fn binomial_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Fraction of the `m`-th radial weight inside the unit circle, from the
/// binomial tail `2^-N sum_{j >= m} C(N, j)`.
pub fn inside_fraction(m: usize, n: usize) -> (f64, f64) {
    let total = 1u128 << n;
    let tail: u128 = (m as u64..=n as u64).map(|j| binomial_exact(n as u64, j)).sum();
    (tail as f64 / total as f64, (total - tail) as f64 / total as f64)
}

/// Calls `f` once for every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// `P(W = 2m - N) = C(N, m) r(m)` with
/// `r(m) = (1/N!) sum_w prod_{i <= m} u_{w(i)} prod_{i > m} v_{w(i)}`,
/// returned for `m = 0..=N`.
pub fn permutation_distribution(n: usize) -> Vec<f64> {
    let uv: Vec<(f64, f64)> = (1..=n).map(|j| inside_fraction(j, n)).collect();
    let mut r = vec![0.0; n + 1];
    let mut perms = 0u64;
    for_each_permutation(n, |w| {
        perms += 1;
        for (m, slot) in r.iter_mut().enumerate() {
            let mut prod = 1.0;
            for (i, &wi) in w.iter().enumerate() {
                prod *= if i < m { uv[wi].0 } else { uv[wi].1 };
            }
            *slot += prod;
        }
    });
    r.iter()
        .enumerate()
        .map(|(m, &x)| binomial_exact(n as u64, m as u64) as f64 * x / perms as f64)
        .collect()
}

/// `(2N - 1)!! / (2N - 2)!! = 2 Gamma(N + 1/2) / (sqrt(pi) Gamma(N))`.
pub fn double_factorial_ratio(n: usize) -> f64 {
    let x = n as f64;
    2.0 * (ln_gamma(x + 0.5) - ln_gamma(x)).exp() / std::f64::consts::PI.sqrt()
}

/// Pearson chi-square statistic, degrees of freedom and upper-tail p-value.
pub fn chi_square(observed: &[u64], probabilities: &[f64]) -> (f64, usize, f64) {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0;
    for (&o, &p) in observed.iter().zip(probabilities) {
        if p > 0.0 {
            let e = p * total as f64;
            stat += (o as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    let df = bins - 1;
    let p = 1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat);
    (stat, df, p)
}
