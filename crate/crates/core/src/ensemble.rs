//! The random matrix model: complex Ginibre sampling, the parametric field
//! `K(p) = K1 cos p + K2 sin p`, its chiral Hamiltonian, and the joint
//! eigenvalue density of the spherical ensemble.
//!
//! Gaussian convention: every entry has independent real and imaginary parts
//! of variance 1/2, so `E|K_ij|^2 = 1`. Winding numbers and the eigenvalues
//! of `K1^-1 K2` do not depend on this scale.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
pub use crate::matrix::{ComplexMat, C64};
use crate::special::{ln_beta, ln_factorial};

/// Eigenvalues of `K1^-1 K2` (or the generalized problem on the unit circle)
/// together with the condition estimate of the solve that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalSpectrum {
    pub z: Vec<C64>,
    pub source_condition: f64,
}

impl SphericalSpectrum {
    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

/// Independent random stream for sample `index` under `seed`.
///
/// Sample `i` always draws from stream `i`, so results do not depend on how
/// samples are distributed over workers.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n x n` complex Ginibre matrix with `E|entry|^2 = 1`.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMat::from_row_major(n, data).expect("gaussian entries are finite")
}

/// The pair `(K1, K2)` defining the random matrix field.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricField {
    k1: ComplexMat,
    k2: ComplexMat,
}

impl ParametricField {
    pub fn new(k1: ComplexMat, k2: ComplexMat) -> Result<Self> {
        if k1.dim() != k2.dim() {
            return Err(Error::InvalidArgument(format!(
                "K1 is {0}x{0} but K2 is {1}x{1}",
                k1.dim(),
                k2.dim()
            )));
        }
        Ok(Self { k1, k2 })
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let k1 = sample_ginibre(n, rng);
        let k2 = sample_ginibre(n, rng);
        Self { k1, k2 }
    }

    pub fn dim(&self) -> usize {
        self.k1.dim()
    }

    pub fn k1(&self) -> &ComplexMat {
        &self.k1
    }

    pub fn k2(&self) -> &ComplexMat {
        &self.k2
    }

    /// `K(p) = K1 cos p + K2 sin p`.
    pub fn evaluate(&self, p: f64) -> ComplexMat {
        let (s, c) = p.sin_cos();
        self.k1.lin_comb(C64::new(c, 0.0), &self.k2, C64::new(s, 0.0))
    }

    /// `K'(p) = -K1 sin p + K2 cos p`.
    pub fn derivative(&self, p: f64) -> ComplexMat {
        let (s, c) = p.sin_cos();
        self.k1.lin_comb(C64::new(-s, 0.0), &self.k2, C64::new(c, 0.0))
    }

    /// `K1 + i K2` and `K1 - i K2`, the coefficients of `K(s)` on the unit circle.
    pub fn circle_pair(&self) -> (ComplexMat, ComplexMat) {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        (
            self.k1.lin_comb(one, &self.k2, i),
            self.k1.lin_comb(one, &self.k2, -i),
        )
    }
}

pub fn field_evaluate(field: &ParametricField, p: f64) -> ComplexMat {
    field.evaluate(p)
}

/// The chiral operator `diag(1_N, -1_N)`.
pub fn chiral_operator(n: usize) -> ComplexMat {
    let diag: Vec<C64> = (0..2 * n)
        .map(|i| C64::new(if i < n { 1.0 } else { -1.0 }, 0.0))
        .collect();
    ComplexMat::from_diag(&diag)
}

/// `H(p) = [[0, K(p)], [K(p)^dagger, 0]]`, a `2N x 2N` Hermitean matrix
/// anticommuting with [`chiral_operator`].
pub fn build_hamiltonian(field: &ParametricField, p: f64) -> ComplexMat {
    let k = field.evaluate(p);
    let kd = k.adjoint();
    let zero = ComplexMat::zeros(field.dim());
    ComplexMat::from_blocks(&[[&zero, &k], [&kd, &zero]])
}

/// `ln c_N` with `c_N = N! prod_{n=1}^N B(n, N - n + 1)`.
pub fn ln_normalization(n: usize) -> f64 {
    ln_factorial(n)
        + (1..=n)
            .map(|m| ln_beta(m as f64, (n - m + 1) as f64))
            .sum::<f64>()
}

/// Logarithm of the spherical-ensemble joint density; `-inf` at coincident
/// eigenvalues.
pub fn ln_joint_density(z: &[C64]) -> Result<f64> {
    let n = z.len();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "joint density needs at least one eigenvalue".into(),
        ));
    }
    let mut ln_vdm = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            ln_vdm += (z[i] - z[j]).norm().ln();
        }
    }
    let ln_weight: f64 = z.iter().map(|w| w.norm_sqr().ln_1p()).sum();
    Ok(2.0 * ln_vdm
        - (n as f64 + 1.0) * ln_weight
        - ln_normalization(n)
        - n as f64 * PI.ln())
}

/// `G(z) = |Delta_N(z)|^2 prod (1 + |z_n|^2)^-(N+1) / (c_N pi^N)`.
pub fn joint_density(z: &[C64]) -> Result<f64> {
    ln_joint_density(z).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn field(k1: &[C64], k2: &[C64]) -> ParametricField {
        ParametricField::new(ComplexMat::from_diag(k1), ComplexMat::from_diag(k2)).unwrap()
    }

    #[test]
    fn ginibre_is_deterministic_per_stream() {
        let a = sample_ginibre(2, &mut sample_stream(42, 3));
        let b = sample_ginibre(2, &mut sample_stream(42, 3));
        let d = sample_ginibre(2, &mut sample_stream(42, 4));
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn field_at_special_angles() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let f = field(&[one, one], &[zero, zero]);
        assert_eq!(f.evaluate(0.0), ComplexMat::identity(2));
        let g = field(&[zero, zero], &[one, one]);
        assert!(g.evaluate(PI / 2.0).sub(&ComplexMat::identity(2)).norm_fro() < 1e-15);
    }

    #[test]
    fn field_antiperiodic_and_periodic() {
        let f = ParametricField::sample(4, &mut sample_stream(1, 0));
        for &p in &[0.0, 0.3, 1.7, 4.0] {
            let a = f.evaluate(p);
            let b = f.evaluate(p + PI);
            assert!(a.add(&b).norm_fro() <= 1e-14 * a.norm_fro());
            let d = f.evaluate(p + 2.0 * PI);
            assert!(a.sub(&d).norm_fro() <= 1e-14 * a.norm_fro());
        }
    }

    #[test]
    fn mismatched_field_rejected() {
        assert!(ParametricField::new(ComplexMat::identity(2), ComplexMat::identity(3)).is_err());
    }

    #[test]
    fn scalar_hamiltonian() {
        let f = field(&[c(1.0, 0.0)], &[c(0.0, 0.0)]);
        let h = build_hamiltonian(&f, 0.0);
        let expected =
            ComplexMat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
                .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn hamiltonian_is_chiral_and_hermitean() {
        for seed in 0..20 {
            let f = ParametricField::sample(5, &mut sample_stream(seed, 0));
            let h = build_hamiltonian(&f, 0.1 * seed as f64);
            let cop = chiral_operator(5);
            let anti = cop.matmul(&h).add(&h.matmul(&cop));
            assert!(anti.norm_fro() <= 1e-14 * h.norm_fro());
            assert_eq!(h, h.adjoint());
        }
    }

    #[test]
    fn density_single_eigenvalue_at_origin() {
        let g = joint_density(&[c(0.0, 0.0)]).unwrap();
        assert!((g - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn density_vanishes_at_coincidence() {
        assert_eq!(joint_density(&[c(0.3, 0.1), c(0.3, 0.1)]).unwrap(), 0.0);
        assert!(joint_density(&[]).is_err());
    }

    #[test]
    fn density_survives_n_12() {
        let z: Vec<C64> = (0..12).map(|k| C64::from_polar(1.0 + 0.1 * k as f64, 0.5 * k as f64)).collect();
        let g = joint_density(&z).unwrap();
        assert!(g.is_finite() && g > 0.0);
    }
}
