//! Spectra of the random field and the two independent winding-number
//! evaluators: eigenvalue counting on the unit circle and phase tracking of
//! `det K(p)`.

mod contour;
mod eigen;

use std::f64::consts::PI;

pub use contour::{winding_contour, winding_trapezoid, ContourGrid};
pub use eigen::eigenvalues;

use crate::ensemble::{ParametricField, SphericalSpectrum};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMat, Lu, C64};

/// Solves whose one-norm condition estimate exceeds this are rejected.
pub const DEFAULT_CONDITION_THRESHOLD: f64 = 1e12;

/// Eigenvalues this close to the unit circle mark a sample as ambiguous.
pub const DEFAULT_EPSILON_CIRCLE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct WindingFlags {
    pub near_unit_circle: bool,
    pub ill_conditioned: bool,
}

impl WindingFlags {
    pub fn any(&self) -> bool {
        self.near_unit_circle || self.ill_conditioned
    }
}

/// Winding number of one field obtained by counting eigenvalues inside the
/// unit circle: `W = 2m - N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindingSample {
    pub n: usize,
    pub m: usize,
    pub w: i64,
    pub flags: WindingFlags,
}

impl WindingSample {
    pub fn from_count(n: usize, m: usize, flags: WindingFlags) -> Self {
        assert!(m <= n, "inside count {m} exceeds dimension {n}");
        Self {
            n,
            m,
            w: 2 * m as i64 - n as i64,
            flags,
        }
    }
}

/// Eigenvalues of `a^-1 b`, rejecting `a` when its condition estimate exceeds
/// `threshold`.
fn reduced_spectrum(a: &ComplexMat, b: &ComplexMat, threshold: f64) -> Result<SphericalSpectrum> {
    let lu = Lu::factor(a).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
        threshold,
    })?;
    let inv = lu.inverse();
    let condition = a.norm_one() * inv.norm_one();
    if !condition.is_finite() || condition > threshold {
        return Err(Error::IllConditioned {
            condition,
            threshold,
        });
    }
    let z = eigenvalues(&inv.matmul(b))?;
    Ok(SphericalSpectrum {
        z,
        source_condition: condition,
    })
}

/// Eigenvalues `z_n` of `K1^-1 K2`.
pub fn spherical_spectrum(field: &ParametricField) -> Result<SphericalSpectrum> {
    spherical_spectrum_with(field, DEFAULT_CONDITION_THRESHOLD)
}

pub fn spherical_spectrum_with(field: &ParametricField, threshold: f64) -> Result<SphericalSpectrum> {
    reduced_spectrum(field.k1(), field.k2(), threshold)
}

/// Generalized eigenvalues `z'` of `(K1 + i K2) v = z' (K1 - i K2) v`, obtained
/// from the standard problem for `(K1 - i K2)^-1 (K1 + i K2)`.
pub fn circle_spectrum(field: &ParametricField) -> Result<SphericalSpectrum> {
    circle_spectrum_with(field, DEFAULT_CONDITION_THRESHOLD)
}

pub fn circle_spectrum_with(field: &ParametricField, threshold: f64) -> Result<SphericalSpectrum> {
    let (plus, minus) = field.circle_pair();
    reduced_spectrum(&minus, &plus, threshold)
}

/// Counts eigenvalues strictly inside the unit circle. Any eigenvalue within
/// `epsilon_circle` of the circle sets `near_unit_circle`; the count still uses
/// the strict inequality.
pub fn winding_from_count(spec: &SphericalSpectrum, epsilon_circle: f64) -> WindingSample {
    let mut flags = WindingFlags::default();
    let mut m = 0;
    for z in &spec.z {
        let r = z.norm();
        if r < 1.0 {
            m += 1;
        }
        if (r - 1.0).abs() < epsilon_circle {
            flags.near_unit_circle = true;
        }
    }
    WindingSample::from_count(spec.dim(), m, flags)
}

/// `K(p)` counts as singular once its smallest LU pivot drops below this
/// fraction of `max(|K1|_F, |K2|_F)`.
pub const SINGULAR_PIVOT_TOLERANCE: f64 = 1e-13;

/// LU factorization of `K(p)`, or `SingularField` when `K(p)` is numerically
/// singular.
pub(crate) fn factor_field(field: &ParametricField, p: f64) -> Result<Lu> {
    let lu = Lu::factor(&field.evaluate(p)).ok_or(Error::SingularField { p })?;
    let scale = field.k1().norm_fro().max(field.k2().norm_fro());
    if lu.min_pivot() <= SINGULAR_PIVOT_TOLERANCE * scale {
        return Err(Error::SingularField { p });
    }
    Ok(lu)
}

/// Winding number density `w(p) = d/dp ln det K(p) = tr(K(p)^-1 K'(p))`.
pub fn winding_density(field: &ParametricField, p: f64) -> Result<C64> {
    let lu = factor_field(field, p)?;
    density_from_lu(field, &lu, p)
}

pub(crate) fn density_from_lu(field: &ParametricField, lu: &Lu, p: f64) -> Result<C64> {
    let x = lu.solve_mat(&field.derivative(p));
    let w = x.trace();
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::SingularField { p });
    }
    Ok(w)
}

/// Eigenvalue form `N cot p - sin(p)^-2 sum 1/(cot p + z_n)` of the winding
/// density, with `z_n` the eigenvalues of `K1^-1 K2`. Singular at `p = 0, pi`;
/// kept as an independent check of [`winding_density`].
pub fn winding_density_eigen(spec: &SphericalSpectrum, p: f64) -> C64 {
    let (s, c) = p.sin_cos();
    let q = c / s;
    let n = spec.dim() as f64;
    let sum: C64 = spec.z.iter().map(|z| (z + q).inv()).sum();
    C64::new(n * q, 0.0) - sum / (s * s)
}

/// Winding number density on `points`, useful for tracing a single sample.
pub fn density_trace(field: &ParametricField, points: &[f64]) -> Result<Vec<C64>> {
    points.iter().map(|&p| winding_density(field, p)).collect()
}

/// Uniform grid of `m` angles on `[0, 2 pi)`.
pub fn uniform_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::sample_stream;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_field(k1: &[C64], k2: &[C64]) -> ParametricField {
        ParametricField::new(ComplexMat::from_diag(k1), ComplexMat::from_diag(k2)).unwrap()
    }

    #[test]
    fn scalar_ratio_spectrum() {
        let f = diag_field(&[c(2.0, 0.0)], &[c(1.0, 1.0)]);
        let s = spherical_spectrum(&f).unwrap();
        assert!((s.z[0] - c(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_spectrum() {
        let d = [c(0.5, 0.0), c(-2.0, 1.0), c(0.0, 3.0)];
        let f = diag_field(&[c(1.0, 0.0); 3], &d);
        let mut z = spherical_spectrum(&f).unwrap().z;
        z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((z[0] - d[1]).norm() < 1e-14);
        assert!((z[1] - d[2]).norm() < 1e-14);
        assert!((z[2] - d[0]).norm() < 1e-14);
    }

    #[test]
    fn random_spectrum_residuals() {
        let f = ParametricField::sample(4, &mut sample_stream(2024, 0));
        let s = spherical_spectrum(&f).unwrap();
        for &z in &s.z {
            // smallest singular value of K2 - z K1 via its determinant ratio
            let m = f.k2().sub(&f.k1().scale(z));
            let lu = Lu::factor(&m).unwrap();
            let inv = lu.inverse();
            let sigma_min = 1.0 / inv.norm_fro();
            assert!(sigma_min < 1e-9, "residual {sigma_min}");
        }
    }

    #[test]
    fn ill_conditioned_rejected() {
        let f = diag_field(&[c(1.0, 0.0), c(1e-14, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(spherical_spectrum(&f), Err(Error::IllConditioned { .. })));
        let g = diag_field(&[c(0.0, 0.0)], &[c(1.0, 0.0)]);
        assert!(matches!(spherical_spectrum(&g), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn circle_spectrum_examples() {
        let f = diag_field(&[c(1.0, 0.0)], &[c(0.0, 0.5)]);
        let s = circle_spectrum(&f).unwrap();
        assert!((s.z[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);

        let f = diag_field(&[c(1.0, 0.0); 2], &[c(0.0, 0.0); 2]);
        assert!(circle_spectrum(&f).unwrap().z.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));

        let f = diag_field(&[c(0.0, 0.0); 2], &[c(1.0, 0.0); 2]);
        assert!(circle_spectrum(&f).unwrap().z.iter().all(|z| (z + c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn count_examples() {
        let s = SphericalSpectrum { z: vec![c(1.0 / 3.0, 0.0)], source_condition: 1.0 };
        let w = winding_from_count(&s, DEFAULT_EPSILON_CIRCLE);
        assert_eq!((w.m, w.w), (1, 1));
        assert!(!w.flags.any());

        let s = SphericalSpectrum { z: vec![c(2.0, 0.0), c(0.0, -1.5), c(-3.0, 3.0)], source_condition: 1.0 };
        assert_eq!(winding_from_count(&s, DEFAULT_EPSILON_CIRCLE).w, -3);

        let s = SphericalSpectrum { z: vec![c(1.0, 0.0), c(0.2, 0.0)], source_condition: 1.0 };
        let w = winding_from_count(&s, DEFAULT_EPSILON_CIRCLE);
        assert_eq!((w.m, w.w), (1, 0));
        assert!(w.flags.near_unit_circle);
    }

    #[test]
    fn density_of_phase_field() {
        for n in 1..=4 {
            let f = diag_field(&vec![c(1.0, 0.0); n], &vec![c(0.0, 1.0); n]);
            for &p in &[0.0, 0.4, PI, 5.0] {
                let w = winding_density(&f, p).unwrap();
                assert!((w - c(0.0, n as f64)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn scalar_density_matches_eigen_form() {
        let z = c(0.3, -0.8);
        let f = diag_field(&[c(1.0, 0.0)], &[z]);
        let spec = spherical_spectrum(&f).unwrap();
        for &p in &[0.3f64, 1.0, 2.0, 4.0] {
            let (s, co) = p.sin_cos();
            let q = co / s;
            let expected = C64::new(q, 0.0) - (z + q).inv() / (s * s);
            assert!((winding_density(&f, p).unwrap() - expected).norm() < 1e-13);
            assert!((winding_density_eigen(&spec, p) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn trace_and_eigen_forms_agree() {
        let f = ParametricField::sample(5, &mut sample_stream(77, 1));
        let spec = spherical_spectrum(&f).unwrap();
        for &p in &[PI / 3.0, 0.9, 2.5, 4.4] {
            let a = winding_density(&f, p).unwrap();
            let b = winding_density_eigen(&spec, p);
            assert!((a - b).norm() <= 1e-10 * a.norm(), "p={p}");
        }
    }

    #[test]
    fn density_smooth_across_zero_and_pi() {
        let f = ParametricField::sample(4, &mut sample_stream(5, 9));
        for &centre in &[0.0, PI] {
            let vals: Vec<C64> = (-20..=20)
                .map(|j| winding_density(&f, centre + j as f64 * 1e-3).unwrap())
                .collect();
            for w in vals.windows(2) {
                assert!((w[1] - w[0]).norm() < 0.1 * (1.0 + w[0].norm()));
            }
        }
    }

    #[test]
    fn singular_field_detected() {
        let f = diag_field(&[c(1.0, 0.0)], &[c(0.0, 0.0)]);
        assert!(matches!(winding_density(&f, PI / 2.0), Err(Error::SingularField { .. })));
    }
}
