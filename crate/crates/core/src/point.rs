//! Points of matricial ranges and clouds of them.
//!
//! A [`MatPoint`] is an m-tuple of `q x q` Hermitian blocks. Its real
//! coordinates ("flattening") are, per block, the `q` diagonal entries followed
//! by `(√2·Re b_ij, √2·Im b_ij)` for `i < j` in row-major order. The map is an
//! isometry from the Frobenius inner product to the Euclidean one, so support
//! functions and convex combinations can be computed on flattened vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::Certificate;
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};

/// Tag written to cloud files for the flattening convention above.
pub const FLATTENING_TAG: &str = "diag+sqrt2-offdiag-rowmajor";

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// An m-tuple of Hermitian `q x q` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoint {
    q: usize,
    blocks: Vec<HermitianMatrix>,
}

impl MatPoint {
    pub fn new(blocks: Vec<HermitianMatrix>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::InvalidArgument("point needs at least one block".into()));
        };
        let q = first.n();
        if blocks.iter().any(|b| b.n() != q) {
            return Err(Error::Dimension("point blocks differ in size".into()));
        }
        Ok(Self { q, blocks })
    }

    pub(crate) fn new_unchecked(q: usize, blocks: Vec<HermitianMatrix>) -> Self {
        Self { q, blocks }
    }

    /// `(c_1 I_q, …, c_m I_q)`.
    pub fn scalar(values: &[f64], q: usize) -> Self {
        Self {
            q,
            blocks: values
                .iter()
                .map(|&c| HermitianMatrix::identity(q).scale(c))
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &HermitianMatrix {
        &self.blocks[j]
    }

    /// Number of real coordinates, `m·q²`.
    pub fn real_dim(&self) -> usize {
        self.m() * self.q * self.q
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.real_dim());
        for b in &self.blocks {
            flatten_block(b.as_matrix(), &mut out);
        }
        out
    }

    pub fn from_flat(coords: &[f64], m: usize, q: usize) -> Result<Self> {
        if coords.len() != m * q * q {
            return Err(Error::Dimension(format!(
                "{} coordinates for m={m}, q={q} (need {})",
                coords.len(),
                m * q * q
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinate".into()));
        }
        let blocks = coords
            .chunks(q * q)
            .map(|c| HermitianMatrix::new_unchecked(unflatten_block(c, q)))
            .collect();
        Ok(Self { q, blocks })
    }

    /// Scalar coordinates `(b_1, …, b_m)` when `q = 1`.
    pub fn scalars(&self) -> Option<Vec<f64>> {
        (self.q == 1).then(|| self.blocks.iter().map(|b| b.as_matrix()[(0, 0)].re).collect())
    }

    /// `t·self + (1−t)·other`.
    pub fn convex_combination(&self, other: &MatPoint, t: f64) -> Result<MatPoint> {
        if self.m() != other.m() || self.q != other.q {
            return Err(Error::Dimension("convex combination of differently shaped points".into()));
        }
        Ok(Self {
            q: self.q,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.scale(t).add(&b.scale(1.0 - t)))
                .collect(),
        })
    }

    /// `Z_j = Σ_i t_ij Y_i`, the image of a point under a real tuple transform.
    pub fn transform(&self, t: &[Vec<f64>]) -> Result<MatPoint> {
        let m = self.m();
        if t.len() != m || t.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("transform must be m x m".into()));
        }
        let blocks = (0..m)
            .map(|j| {
                let w: Vec<f64> = (0..m).map(|i| t[i][j]).collect();
                HermitianMatrix::linear_combination(&w, &self.blocks, self.q)
            })
            .collect();
        Ok(Self { q: self.q, blocks })
    }

    /// Frobenius distance to another point (sum over blocks).
    pub fn distance(&self, other: &MatPoint) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.as_matrix().sub(b.as_matrix()).frobenius_norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn flatten_block(b: &ComplexMatrix, out: &mut Vec<f64>) {
    let q = b.rows();
    for i in 0..q {
        out.push(b[(i, i)].re);
    }
    for i in 0..q {
        for j in i + 1..q {
            out.push(SQRT2 * b[(i, j)].re);
            out.push(SQRT2 * b[(i, j)].im);
        }
    }
}

pub(crate) fn unflatten_block(c: &[f64], q: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(q, q);
    for i in 0..q {
        m[(i, i)] = C64::new(c[i], 0.0);
    }
    let mut k = q;
    for i in 0..q {
        for j in i + 1..q {
            let z = C64::new(c[k], c[k + 1]) / SQRT2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// A plain real vector viewed as a point of a scalar joint range.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPoint(pub Vec<f64>);

impl ScalarPoint {
    pub fn to_matpoint(&self) -> MatPoint {
        MatPoint::scalar(&self.0, 1)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Real affine map `x ↦ Mx + b` on flattened coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn identity(d: usize) -> Self {
        Self {
            matrix: (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            offset: vec![0.0; d],
        }
    }

    /// `(B_1, …, B_m) ↦ (tr B_1, …, tr B_m)`.
    pub fn trace_per_coordinate(m: usize, q: usize) -> Self {
        let d = m * q * q;
        let matrix = (0..m)
            .map(|j| {
                let mut row = vec![0.0; d];
                for i in 0..q {
                    row[j * q * q + i] = 1.0;
                }
                row
            })
            .collect();
        Self {
            matrix,
            offset: vec![0.0; m],
        }
    }

    /// `(B_1, …, B_m) ↦ (tr(C B_1), …, tr(C B_m))` for Hermitian `C`.
    pub fn c_trace(c: &HermitianMatrix, m: usize) -> Self {
        let q = c.n();
        let mut fc = Vec::new();
        flatten_block(c.as_matrix(), &mut fc);
        let d = m * q * q;
        let matrix = (0..m)
            .map(|j| {
                let mut row = vec![0.0; d];
                row[j * q * q..(j + 1) * q * q].copy_from_slice(&fc);
                row
            })
            .collect();
        Self {
            matrix,
            offset: vec![0.0; m],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.first().map_or(0, |r| r.len())
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b)
            .collect()
    }
}

/// Provenance attached to a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub seed: u64,
    pub accept_tol: f64,
    pub generator: String,
    pub attempts: usize,
    pub acceptance_rate: f64,
    pub affine: Option<AffineMap>,
}

/// A finite sample of points of `Λ_{p,q}`, optionally with certificates
/// aligned one-to-one with the points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub points: Vec<MatPoint>,
    pub certificates: Option<Vec<Certificate>>,
    pub meta: CloudMeta,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `max_{B ∈ cloud} ⟨u, flatten(B)⟩`, or `-inf` for an empty cloud.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|b| b.flatten().iter().zip(u).map(|(x, y)| x * y).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn flattened(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|b| b.flatten()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn herm(q: usize, vals: &[f64]) -> HermitianMatrix {
        HermitianMatrix::new_unchecked(unflatten_block(vals, q))
    }

    proptest! {
        #[test]
        fn flattening_is_frobenius_isometry(
            a in proptest::collection::vec(-5.0f64..5.0, 9),
            b in proptest::collection::vec(-5.0f64..5.0, 9),
        ) {
            let x = herm(3, &a);
            let y = herm(3, &b);
            let frob = x.as_matrix().adjoint_matmul(y.as_matrix()).trace().re;
            let eucl: f64 = a.iter().zip(&b).map(|(s, t)| s * t).sum();
            prop_assert!((frob - eucl).abs() < 1e-10);
            let p = MatPoint::new(vec![x.clone(), y.clone()]).unwrap();
            let back = MatPoint::from_flat(&p.flatten(), 2, 3).unwrap();
            prop_assert!(back.distance(&p) < 1e-12);
        }
    }

    #[test]
    fn trace_map_on_q2() {
        let b1 = herm(2, &[1.0, 2.0, 0.3, -0.4]);
        let b2 = herm(2, &[-1.0, 5.0, 0.0, 1.0]);
        let p = MatPoint::new(vec![b1, b2]).unwrap();
        let l = AffineMap::trace_per_coordinate(2, 2);
        assert_eq!(l.apply(&p.flatten()), vec![3.0, 4.0]);
    }

    #[test]
    fn c_trace_matches_direct() {
        let c = herm(2, &[0.5, -1.0, 0.7, 0.2]);
        let b = herm(2, &[1.0, 2.0, 0.3, -0.4]);
        let p = MatPoint::new(vec![b.clone()]).unwrap();
        let l = AffineMap::c_trace(&c, 1);
        let direct = c.as_matrix().matmul(b.as_matrix()).trace().re;
        assert!((l.apply(&p.flatten())[0] - direct).abs() < 1e-12);
    }
}
