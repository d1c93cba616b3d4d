//! Eigenvalues of dense complex matrices: Householder reduction to upper
//! Hessenberg form followed by single-shift complex QR sweeps with Wilkinson
//! shifts and deflation.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMat, C64};

/// Per-eigenvalue sweep cap before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// In-place reduction to upper Hessenberg form by unitary similarity.
fn hessenberg(h: &mut ComplexMat) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![zero(); n];
    for k in 0..n - 2 {
        let alpha_norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * alpha_norm;

        for i in 0..n {
            v[i] = zero();
        }
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = h[(i, k)];
        }
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for i in k + 1..n {
            v[i] /= vnorm;
        }

        // H <- (I - 2 v v*) H
        for j in 0..n {
            let s: C64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let s2 = s * 2.0;
            for i in k + 1..n {
                let vi = v[i];
                h[(i, j)] -= vi * s2;
            }
        }
        // H <- H (I - 2 v v*)
        for i in 0..n {
            let s: C64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            let s2 = s * 2.0;
            for j in k + 1..n {
                let vj = v[j].conj();
                h[(i, j)] -= s2 * vj;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = zero();
        }
    }
}

/// Rotation `[c s; -conj(s) c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, zero());
    }
    if an == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalue of the trailing `2 x 2` block closest to its last diagonal entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of `a`, with multiplicity, in deflation order.
pub fn eigenvalues(a: &ComplexMat) -> Result<Vec<C64>> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument("eigenvalues of a non-finite matrix".into()));
    }
    let n = a.dim();
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);

    let scale = h.norm_fro().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut found: Vec<C64> = Vec::with_capacity(n);
    let mut rotations: Vec<(f64, C64)> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut sweeps_here = 0usize;

    loop {
        if hi == 0 {
            found.push(h[(0, 0)]);
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let tol = if diag == 0.0 { eps * scale } else { eps * diag };
            if sub <= tol {
                h[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            found.push(h[(hi, hi)]);
            hi -= 1;
            sweeps_here = 0;
            continue;
        }

        sweeps += 1;
        sweeps_here += 1;
        if sweeps_here > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                dim: n,
                partial: found,
            });
        }

        let shift = if sweeps_here % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotations.push((c, s));
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            let row_end = (k + 2).min(hi);
            for i in lo..=row_end {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    found.reverse();
    Ok(found)
}
