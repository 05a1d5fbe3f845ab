use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "entry ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(l)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^* * other` without forming the adjoint.
    pub fn adjoint_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_matmul dimension mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let a_row = self.row(l);
            let b_row = other.row(l);
            for (i, &a) in a_row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let ac = a.conj();
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += ac * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Real part of the Frobenius inner product `tr(self^* other)`.
    pub fn real_inner(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn columns(&self, c0: usize, count: usize) -> Self {
        self.submatrix(0, c0, self.rows, count)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)]
            } else {
                other[(i - self.rows, j)]
            }
        })
    }

    /// Block diagonal `self ⊕ other`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// `I_p ⊗ self`.
    pub fn kron_identity(&self, p: usize) -> Self {
        let (r, c) = (self.rows, self.cols);
        let mut out = Self::zeros(p * r, p * c);
        for b in 0..p {
            for i in 0..r {
                for j in 0..c {
                    out[(b * r + i, b * c + j)] = self[(i, j)];
                }
            }
        }
        out
    }

    /// `‖self − self^*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Replaces the matrix by `(M + M^*)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖self^* self − I‖_F`.
    pub fn isometry_defect(&self) -> f64 {
        let g = self.adjoint_matmul(self);
        g.sub(&Self::identity(self.cols)).frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_matmul_matches_explicit() {
        let a = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let b = ComplexMatrix::from_fn(3, 4, |i, j| c((i * j) as f64, 1.0));
        let lhs = a.adjoint_matmul(&b);
        let rhs = a.adjoint().matmul(&b);
        assert!(lhs.sub(&rhs).frobenius_norm() < 1e-14);
    }

    #[test]
    fn kron_identity_traces() {
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.0));
        let k = b.kron_identity(3);
        assert_eq!(k.rows(), 6);
        assert!((k.trace() - b.trace() * 3.0).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let r = ComplexMatrix::from_row_major(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
