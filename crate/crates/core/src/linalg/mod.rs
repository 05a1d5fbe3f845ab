//! Dense complex linear algebra: Hermitian matrices and tuples, isometries,
//! compressions and block assembly.

pub mod eig;
pub mod matrix;
pub mod qr;
pub mod random;
pub(crate) mod real;

pub use eig::{herm_eig, Eigen};
pub use matrix::{ComplexMatrix, C64};
pub use qr::{orthogonal_complement, orthonormal_basis, orthonormalize};
pub use random::random_isometry;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance: `‖A − A*‖_F ≤ 1e-12 · max(1, ‖A‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Isometry tolerance: `‖X*X − I‖_F ≤ 1e-10`.
pub const ISOMETRY_TOL: f64 = 1e-10;

/// An `n x n` Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity at [`HERMITIAN_TOL`] and stores the exact
    /// Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("Hermitian matrix entry".into()));
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL * m.frobenius_norm().max(1.0) {
            let (row, col) = worst_entry(&m);
            return Err(Error::NotHermitian {
                member: 0,
                row,
                col,
                defect,
            });
        }
        Ok(Self(m.hermitian_part()))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(values))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    /// `Σ w_j H_j` for real weights.
    pub fn linear_combination(weights: &[f64], members: &[HermitianMatrix], n: usize) -> Self {
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, h) in weights.iter().zip(members) {
            if *w != 0.0 {
                acc.axpy(C64::new(*w, 0.0), &h.0);
            }
        }
        Self(acc)
    }
}

/// Entry with the largest deviation from Hermiticity.
pub(crate) fn worst_entry(m: &ComplexMatrix) -> (usize, usize) {
    let n = m.rows();
    let mut best = (0, 0, -1.0);
    for i in 0..n {
        for j in 0..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// An m-tuple of `n x n` Hermitian matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTuple {
    n: usize,
    members: Vec<HermitianMatrix>,
}

impl HermitianTuple {
    pub fn new(members: Vec<HermitianMatrix>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidArgument("tuple needs at least one member".into()));
        };
        let n = first.n();
        if let Some(j) = members.iter().position(|h| h.n() != n) {
            return Err(Error::Dimension(format!(
                "member {j} is {}x{}, expected {n}x{n}",
                members[j].n(),
                members[j].n()
            )));
        }
        Ok(Self { n, members })
    }

    pub(crate) fn new_unchecked(n: usize, members: Vec<HermitianMatrix>) -> Self {
        Self { n, members }
    }

    /// Convenience: a tuple of real diagonal matrices.
    pub fn diagonal(diagonals: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            diagonals
                .iter()
                .map(|d| HermitianMatrix::from_real_diagonal(d))
                .collect(),
        )
    }

    /// `(c_1 I_n, …, c_m I_n)`.
    pub fn scalar(values: &[f64], n: usize) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&c| HermitianMatrix::identity(n).scale(c))
                .collect(),
        )
    }

    /// The Pauli triple `(σx, σy, σz)`.
    pub fn pauli() -> Self {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let sx = ComplexMatrix::from_row_major(2, 2, vec![z, one, one, z]).unwrap();
        let sy = ComplexMatrix::from_row_major(2, 2, vec![z, -i, i, z]).unwrap();
        let sz = ComplexMatrix::from_row_major(2, 2, vec![one, z, z, -one]).unwrap();
        Self::new_unchecked(
            2,
            vec![
                HermitianMatrix(sx),
                HermitianMatrix(sy),
                HermitianMatrix(sz),
            ],
        )
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[HermitianMatrix] {
        &self.members
    }

    pub fn member(&self, j: usize) -> &HermitianMatrix {
        &self.members[j]
    }

    /// `Σ_j u_j A_j`.
    pub fn combination(&self, u: &[f64]) -> HermitianMatrix {
        HermitianMatrix::linear_combination(u, &self.members, self.n)
    }

    /// Largest Frobenius norm among members (at least 1), used to scale
    /// tolerances.
    pub fn scale(&self) -> f64 {
        self.members
            .iter()
            .map(|h| h.as_matrix().frobenius_norm())
            .fold(1.0, f64::max)
    }

    /// Member-wise sum with another tuple of matching shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m() != other.m() || self.n != other.n {
            return Err(Error::Dimension("tuple sum shape mismatch".into()));
        }
        Ok(Self::new_unchecked(
            self.n,
            self.members
                .iter()
                .zip(&other.members)
                .map(|(a, b)| a.add(b))
                .collect(),
        ))
    }
}

/// An `n x k` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry(ComplexMatrix);

impl Isometry {
    /// Validates `‖X*X − I‖_F ≤ 1e-10` and `k ≤ n`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.cols() > m.rows() {
            return Err(Error::Dimension(format!(
                "isometry has {} columns in dimension {}",
                m.cols(),
                m.rows()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("isometry entry".into()));
        }
        let defect = m.isometry_defect();
        if defect > ISOMETRY_TOL {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    /// The first `k` coordinate vectors of `C^n`.
    pub fn coordinate(n: usize, k: usize) -> Self {
        Self(ComplexMatrix::from_fn(n, k, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// Selected coordinate vectors, in the given order.
    pub fn coordinates(n: usize, idx: &[usize]) -> Self {
        Self(ComplexMatrix::from_fn(n, idx.len(), |i, j| {
            if i == idx[j] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn k(&self) -> usize {
        self.0.cols()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn defect(&self) -> f64 {
        self.0.isometry_defect()
    }

    /// `self · other` (composition of isometries is an isometry).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.k() != other.n() {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} with {}x{}",
                self.n(),
                self.k(),
                other.n(),
                other.k()
            )));
        }
        Ok(Isometry(self.0.matmul(&other.0)))
    }

    /// `[self | other]`, valid when the two ranges are orthogonal.
    pub fn hstack(&self, other: &Isometry) -> Result<Isometry> {
        if self.n() != other.n() {
            return Err(Error::Dimension("hstack of isometries in different spaces".into()));
        }
        Isometry::new(self.0.hstack(&other.0))
    }
}

/// `(X*A_1X, …, X*A_mX)`.
pub fn compress(a: &HermitianTuple, x: &Isometry) -> Result<HermitianTuple> {
    if x.n() != a.n() {
        return Err(Error::Dimension(format!(
            "isometry acts on dimension {}, tuple on {}",
            x.n(),
            a.n()
        )));
    }
    let xm = x.as_matrix();
    let members = a
        .members()
        .iter()
        .map(|h| HermitianMatrix(xm.adjoint_matmul(&h.as_matrix().matmul(xm)).hermitian_part()))
        .collect();
    Ok(HermitianTuple::new_unchecked(x.k(), members))
}

/// `(I_p ⊗ B_1, …, I_p ⊗ B_m)`.
pub fn kron_block(p: usize, b: &HermitianTuple) -> Result<HermitianTuple> {
    if p == 0 {
        return Err(Error::InvalidArgument("kron_block needs p >= 1".into()));
    }
    let members = b
        .members()
        .iter()
        .map(|h| HermitianMatrix(h.as_matrix().kron_identity(p)))
        .collect();
    Ok(HermitianTuple::new_unchecked(p * b.n(), members))
}

/// `(A_1 ⊕ B_1, …, A_m ⊕ B_m)`.
pub fn direct_sum(a: &HermitianTuple, b: &HermitianTuple) -> Result<HermitianTuple> {
    if a.m() != b.m() {
        return Err(Error::Dimension(format!(
            "direct sum of a {}-tuple and a {}-tuple",
            a.m(),
            b.m()
        )));
    }
    let members = a
        .members()
        .iter()
        .zip(b.members())
        .map(|(x, y)| HermitianMatrix(x.as_matrix().block_diag(y.as_matrix())))
        .collect();
    Ok(HermitianTuple::new_unchecked(a.n() + b.n(), members))
}
