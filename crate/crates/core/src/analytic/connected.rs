//! Completely connected averages `<prod_n 1 / (q_n + z_n)>` over the
//! spherical ensemble, as permutation sums of determinants of `L`.

use std::f64::consts::PI;

use crate::ensemble::ln_normalization;
use crate::error::{Error, Result};
use crate::special::ln_factorial;

use super::beta::{l_function, l_normalized};

/// Largest matrix dimension accepted by the permutation-sum routines.
pub const MAX_PERMUTATION_DIM: usize = 8;

/// Visits every ordered selection of `k` distinct values from `0..n` in
/// lexicographic order.
pub(crate) fn for_each_arrangement<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    fn recurse<F: FnMut(&[usize])>(n: usize, k: usize, used: &mut [bool], cur: &mut Vec<usize>, f: &mut F) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                recurse(n, k, used, cur, f);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut used = vec![false; n];
    let mut cur = Vec::with_capacity(k);
    recurse(n, k, &mut used, &mut cur, &mut f);
}

/// Determinant of a small dense real matrix (row-major), destroying `a`.
pub(crate) fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap();
        if a[p * n + k] == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    det
}

fn check_arguments(q: &[f64]) -> Result<()> {
    if let Some(bad) = q.iter().find(|x| !x.is_finite() || **x == 0.0) {
        return Err(Error::InvalidArgument(format!(
            "connected averages need finite nonzero q, got {bad}"
        )));
    }
    Ok(())
}

/// `<prod_{n=1}^N 1 / (q_n + z_n)> = (c_N pi^N)^-1 sum_{w in S_N} det[L_{n m w(n)}(q_{w(n)})]`,
/// with `N = q.len()`.
pub fn n_point_connected(q: &[f64]) -> Result<f64> {
    let n = q.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one argument".into()));
    }
    if n > MAX_PERMUTATION_DIM {
        return Err(Error::UnsupportedSize {
            what: "N-point connected average",
            size: n,
            max: MAX_PERMUTATION_DIM,
        });
    }
    check_arguments(q)?;

    // table[(row * n + col) * n + l] = L_{row+1, col+1, l+1}(q_l)
    let mut table = vec![0.0; n * n * n];
    for row in 0..n {
        for col in 0..n {
            for (l, &ql) in q.iter().enumerate() {
                table[(row * n + col) * n + l] = l_function(row + 1, col + 1, n, ql)?;
            }
        }
    }

    let mut sum = 0.0;
    let mut work = vec![0.0; n * n];
    for_each_arrangement(n, n, |omega| {
        for row in 0..n {
            for col in 0..n {
                work[row * n + col] = table[(row * n + col) * n + omega[row]];
            }
        }
        sum += det_in_place(&mut work, n);
    });
    let ln_scale = ln_normalization(n) + n as f64 * PI.ln();
    Ok(sum * (-ln_scale).exp())
}

/// `k`-point connected average `<prod_{n=1}^k 1 / (q_n + z_n)>` for an
/// `N x N` ensemble, obtained from the `N`-point average by sending the
/// excess arguments to infinity:
///
/// `(c_N pi^k)^-1 sum_{w in S_N} prod_{l > k} B(w(l), N - w(l) + 1) det[L_{w(n) w(m) n}(q_n)]_{n,m <= k}`.
///
/// Only `w(1..k)` enters the determinant, so the sum runs over ordered
/// `k`-subsets; the `(N - k)!` completions and all Beta factors cancel
/// against `c_N` after stripping the column normalization of `L`.
pub fn k_point_connected(q: &[f64], n: usize) -> Result<f64> {
    let k = q.len();
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one argument".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} arguments exceed the ensemble dimension N = {n}"
        )));
    }
    if n > MAX_PERMUTATION_DIM {
        return Err(Error::UnsupportedSize {
            what: "k-point connected average",
            size: n,
            max: MAX_PERMUTATION_DIM,
        });
    }
    check_arguments(q)?;

    // table[(i * n + a) * n + b] = L~_{a+1, b+1}(q_i)
    let mut table = vec![0.0; k * n * n];
    for (i, &qi) in q.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                table[(i * n + a) * n + b] = l_normalized(a + 1, b + 1, n, qi)?;
            }
        }
    }

    let mut sum = 0.0;
    let mut work = vec![0.0; k * k];
    for_each_arrangement(n, k, |sigma| {
        for row in 0..k {
            for col in 0..k {
                work[row * k + col] = table[(row * n + sigma[row]) * n + sigma[col]];
            }
        }
        sum += det_in_place(&mut work, k);
    });
    Ok(sum * (ln_factorial(n - k) - ln_factorial(n)).exp())
}
