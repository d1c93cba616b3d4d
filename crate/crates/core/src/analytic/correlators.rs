//! Correlation functions `C_k(p_1, ..., p_k) = <w(p_1) ... w(p_k)>` of the
//! winding number density.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

use super::connected::{k_point_connected, MAX_PERMUTATION_DIM};

/// Largest order handled by [`ck_assemble`].
pub const MAX_ASSEMBLY_ORDER: usize = 3;

/// Minimum distance (mod pi) between any two angles, and between any angle
/// and the poles `0`, `pi/2` of `q = cot p`, accepted by [`ck_assemble`].
pub const MIN_ANGLE_SEPARATION: f64 = 1e-6;

/// `C_1(p) = 0`.
pub fn c1(_p: f64) -> f64 {
    0.0
}

/// `C_2(p_1, p_2) = -(1 - cos^{2N} d) / (1 - cos^2 d)` with `d = p_1 - p_2`.
///
/// Evaluated as `expm1(N ln(1 - sin^2 d)) / sin^2 d`, which stays accurate as
/// `d -> 0`. Coincident points (mod pi) are refused; the continuous limit there
/// is `-N`.
pub fn c2(p1: f64, p2: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let d = p1 - p2;
    if !d.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite angles ({p1}, {p2})")));
    }
    let s = d.sin();
    if s.abs() <= 4.0 * f64::EPSILON * d.abs().max(1.0) {
        return Err(Error::CoincidentPoints { limit: -(n as f64) });
    }
    let s2 = s * s;
    Ok((n as f64 * (-s2).ln_1p()).exp_m1() / s2)
}

/// Mean level spacing `pi / sqrt(2N)` of the `p`-dependent singular values
/// near zero. Quoted for reference; nothing here depends on it.
pub fn mean_level_spacing(n: usize) -> f64 {
    PI / (2.0 * n as f64).sqrt()
}

/// Distance of `x` from the nearest multiple of `period`.
fn distance_mod(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    r.min(period - r)
}

/// All set partitions of `items`, as lists of blocks.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for partition in set_partitions(rest) {
        for b in 0..partition.len() {
            let mut p = partition.clone();
            p[b].insert(0, first);
            out.push(p);
        }
        let mut p = partition;
        p.insert(0, vec![first]);
        out.push(p);
    }
    out
}

/// `<prod_B sum_{n distinct} prod_{i in B} 1 / (q_i + z_{n_B})>` for one
/// partition of the argument indices: `N!/(N-r)!` times the connected average,
/// each block reduced to simple poles by partial fractions.
fn partition_average(q: &[f64], blocks: &[Vec<usize>], n: usize) -> Result<f64> {
    let r = blocks.len();
    if r > n {
        return Ok(0.0);
    }
    let falling: f64 = (0..r).map(|j| (n - j) as f64).product();

    // Partial-fraction weights: prod_{i in B} 1/(q_i + z) = sum_i w_i / (q_i + z).
    let weights: Vec<Vec<(usize, f64)>> = blocks
        .iter()
        .map(|b| {
            b.iter()
                .map(|&i| {
                    let w: f64 = b
                        .iter()
                        .filter(|&&j| j != i)
                        .map(|&j| 1.0 / (q[j] - q[i]))
                        .product();
                    (i, w)
                })
                .collect()
        })
        .collect();

    let mut total = 0.0;
    let mut choice = vec![0usize; r];
    loop {
        let mut weight = 1.0;
        let mut args = Vec::with_capacity(r);
        for (b, &c) in choice.iter().enumerate() {
            let (i, w) = weights[b][c];
            weight *= w;
            args.push(q[i]);
        }
        total += weight * k_point_connected(&args, n)?;

        // odometer over one index per block
        let mut b = 0;
        while b < r {
            choice[b] += 1;
            if choice[b] < weights[b].len() {
                break;
            }
            choice[b] = 0;
            b += 1;
        }
        if b == r {
            break;
        }
    }
    Ok(falling * total)
}

/// Full correlator `C_k` for `k <= 3` assembled from connected averages.
///
/// With `q_i = cot p_i`, `w(p) = N q - (1 + q^2) sum_n 1 / (q + z_n)`. The
/// product over `i` expands into subsets `S` of the arguments; each
/// `<prod_{i in S} sum_n 1 / (q_i + z_n)>` splits over set partitions of `S`
/// (which arguments share an eigenvalue), and repeated eigenvalues are
/// reduced by partial fractions to the `k`-point connected average.
///
/// The angles must stay [`MIN_ANGLE_SEPARATION`] away from each other and
/// from `0` and `pi/2` modulo `pi`; [`ck_translated`] shifts them for callers
/// that only care about the translation-invariant value.
pub fn ck_assemble(p: &[f64], n: usize) -> Result<f64> {
    let k = p.len();
    if k == 0 || k > MAX_ASSEMBLY_ORDER {
        return Err(Error::UnsupportedSize {
            what: "correlator assembly order",
            size: k,
            max: MAX_ASSEMBLY_ORDER,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n > MAX_PERMUTATION_DIM {
        return Err(Error::UnsupportedSize {
            what: "correlator assembly dimension",
            size: n,
            max: MAX_PERMUTATION_DIM,
        });
    }
    for &pi in p {
        if !pi.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {pi}")));
        }
        if distance_mod(pi, PI) < MIN_ANGLE_SEPARATION
            || distance_mod(pi - FRAC_PI_2, PI) < MIN_ANGLE_SEPARATION
        {
            return Err(Error::InvalidArgument(format!(
                "angle {pi} too close to a pole of cot p or to a zero of cot p"
            )));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            if distance_mod(p[i] - p[j], PI) < MIN_ANGLE_SEPARATION {
                return Err(if k == 2 {
                    Error::CoincidentPoints { limit: -(n as f64) }
                } else {
                    Error::InvalidArgument(format!("angles {} and {} coincide mod pi", p[i], p[j]))
                });
            }
        }
    }

    let q: Vec<f64> = p.iter().map(|&x| x.cos() / x.sin()).collect();
    let nf = n as f64;
    let mut total = 0.0;
    for mask in 0u32..(1 << k) {
        let subset: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let mut prefactor = 1.0;
        for i in 0..k {
            prefactor *= if mask & (1 << i) != 0 {
                -(1.0 + q[i] * q[i])
            } else {
                nf * q[i]
            };
        }
        let average = if subset.is_empty() {
            1.0
        } else {
            set_partitions(&subset)
                .iter()
                .map(|blocks| partition_average(&q, blocks, n))
                .sum::<Result<f64>>()?
        };
        total += prefactor * average;
    }
    Ok(total)
}

/// [`ck_assemble`] after a common shift of all angles, chosen from a fixed
/// grid to keep every `cot p_i` well away from `0` and infinity. Valid because
/// `C_k` depends only on the differences `p_i - p_j`.
pub fn ck_translated(p: &[f64], n: usize) -> Result<f64> {
    const CANDIDATES: usize = 64;
    let margin = |shift: f64| {
        p.iter()
            .map(|&x| distance_mod(x + shift, FRAC_PI_2))
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (0.0, margin(0.0));
    for j in 1..CANDIDATES {
        let shift = PI * j as f64 / CANDIDATES as f64;
        let m = margin(shift);
        if m > best.1 + 1e-12 {
            best = (shift, m);
        }
    }
    let shifted: Vec<f64> = p.iter().map(|&x| x + best.0).collect();
    ck_assemble(&shifted, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c2_special_values() {
        for n in 1..=10 {
            assert!((c2(FRAC_PI_2, 0.0, n).unwrap() + 1.0).abs() < 1e-15);
            assert!((c2(0.3, 1.1, 1).unwrap() + 1.0).abs() < 1e-15);
        }
        assert!((c2(PI / 4.0, 0.0, 2).unwrap() + 1.5).abs() < 1e-15);
    }

    #[test]
    fn c2_matches_raw_form_and_limit() {
        for n in 1..=12 {
            for &d in &[0.2f64, 0.7, 1.3, 2.5, 3.0] {
                let c = d.cos().powi(2);
                let raw = -(1.0 - c.powi(n as i32)) / (1.0 - c);
                assert!((c2(d, 0.0, n).unwrap() - raw).abs() < 1e-12);
            }
            let near = c2(1e-7, 0.0, n).unwrap();
            assert!((near + n as f64).abs() < 1e-9 * (n * n) as f64);
        }
    }

    #[test]
    fn c2_refuses_coincident_points() {
        assert_eq!(c2(0.4, 0.4, 5), Err(Error::CoincidentPoints { limit: -5.0 }));
        assert_eq!(c2(0.4 + PI, 0.4, 5), Err(Error::CoincidentPoints { limit: -5.0 }));
    }

    #[test]
    fn set_partition_counts() {
        assert_eq!(set_partitions(&[]).len(), 1);
        assert_eq!(set_partitions(&[0]).len(), 1);
        assert_eq!(set_partitions(&[0, 1]).len(), 2);
        assert_eq!(set_partitions(&[0, 1, 2]).len(), 5);
    }

    #[test]
    fn one_point_vanishes() {
        for n in 1..=6 {
            for &p in &[0.3, 1.0, 2.0, 2.8] {
                assert!(ck_assemble(&[p], n).unwrap().abs() < 1e-12, "n={n} p={p}");
            }
        }
        assert_eq!(c1(0.3), 0.0);
    }

    #[test]
    fn two_point_matches_closed_form() {
        for n in 1..=6 {
            for &(p1, p2) in &[(0.3, 0.8), (0.4, 1.4), (0.2, 0.2 + FRAC_PI_2), (2.0, 0.9)] {
                let assembled = ck_assemble(&[p1, p2], n).unwrap();
                let closed = c2(p1, p2, n).unwrap();
                assert!((assembled - closed).abs() < 1e-10, "n={n} {assembled} {closed}");
            }
        }
    }

    #[test]
    fn translated_handles_poles() {
        let v = ck_translated(&[0.0, FRAC_PI_2], 4).unwrap();
        assert!((v + 1.0).abs() < 1e-10);
        assert!(ck_assemble(&[0.0, FRAC_PI_2], 4).is_err());
    }

    #[test]
    fn assembly_rejects_bad_inputs() {
        assert!(ck_assemble(&[0.3, 0.5, 0.7, 0.9], 4).is_err());
        assert!(ck_assemble(&[0.3, 0.3 + PI], 4).is_err());
        assert!(ck_assemble(&[0.3], 9).is_err());
    }
}
