//! Dense square complex matrices and LU factorization with partial pivoting.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense `n x n` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMat {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMat {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless `data.len() == n * n`,
    /// `n >= 1` and all entries are finite.
    pub fn from_row_major(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("rows must form a square matrix".into()));
        }
        Self::from_row_major(n, rows.iter().flatten().copied().collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: C64, other: &ComplexMat, b: C64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn add(&self, other: &ComplexMat) -> Self {
        let one = C64::new(1.0, 0.0);
        self.lin_comb(one, other, one)
    }

    pub fn sub(&self, other: &ComplexMat) -> Self {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMat) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Embeds `blocks[r][c]` (each `m x m`) into one `(rows*m) x (rows*m)` matrix.
    pub fn from_blocks(blocks: &[[&ComplexMat; 2]; 2]) -> Self {
        let m = blocks[0][0].n;
        let mut out = Self::zeros(2 * m);
        for (br, row) in blocks.iter().enumerate() {
            for (bc, block) in row.iter().enumerate() {
                assert_eq!(block.n, m, "block dimension mismatch");
                for i in 0..m {
                    for j in 0..m {
                        out[(br * m + i, bc * m + j)] = block[(i, j)];
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMat {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for ComplexMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMat({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// LU factorization `P A = L U` with row pivoting; `L` has unit diagonal.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMat,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(a: &ComplexMat) -> Option<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 || !pmax.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Some(Self { lu, perm, swaps })
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.dim();
        let d: C64 = (0..n).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Smallest pivot magnitude `min |u_ii|`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.lu.dim())
            .map(|i| self.lu[(i, i)].norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &ComplexMat) -> ComplexMat {
        let n = self.lu.dim();
        let mut out = ComplexMat::zeros(n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> ComplexMat {
        self.solve_mat(&ComplexMat::identity(self.lu.dim()))
    }
}

/// One-norm condition number `|A|_1 |A^-1|_1`, infinite for singular `A`.
pub fn condition_one(a: &ComplexMat) -> f64 {
    match Lu::factor(a) {
        Some(lu) => {
            let inv = lu.inverse();
            if !inv.is_finite() {
                return f64::INFINITY;
            }
            a.norm_one() * inv.norm_one()
        }
        None => f64::INFINITY,
    }
}
