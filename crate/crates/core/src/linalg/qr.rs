//! Gram–Schmidt based orthonormalization, rank-revealing bases and
//! orthogonal complements.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::Isometry;
use crate::error::{Error, Result};

/// Columns whose norm after projection falls below this are treated as
/// dependent by [`orthonormalize`].
pub const INDEPENDENCE_TOL: f64 = 1e-12;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Projects `v` against every vector in `basis` twice (classical
/// Gram–Schmidt with one re-orthogonalization pass).
fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn columns_of(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}

fn from_columns(rows: usize, cols: &[Vec<C64>]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Thin QR factor with positive real `R` diagonal.
///
/// Fails with the index of the first column whose projected norm is below
/// [`INDEPENDENCE_TOL`] relative to its original norm (or absolutely, for a
/// zero column).
pub fn orthonormalize(m: &ComplexMatrix) -> Result<Isometry> {
    let q = orthonormal_columns(m)?;
    Ok(Isometry::from_matrix_unchecked(q))
}

pub(crate) fn orthonormal_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.cols() > m.rows() {
        return Err(Error::RankDeficient {
            column: m.rows(),
            norm: 0.0,
        });
    }
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m.cols());
    for (j, mut v) in columns_of(m).into_iter().enumerate() {
        let original = norm(&v);
        project_out(&mut v, &basis);
        let nv = norm(&v);
        if nv <= INDEPENDENCE_TOL * original.max(1e-300) || nv == 0.0 {
            return Err(Error::RankDeficient {
                column: j,
                norm: nv,
            });
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        basis.push(v);
    }
    Ok(from_columns(m.rows(), &basis))
}

/// Orthonormal basis of the column space of `m`, dropping columns whose
/// projected norm falls below `rel_tol * max column norm`.
pub fn orthonormal_basis(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let cols = columns_of(m);
    let scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    if scale == 0.0 {
        return ComplexMatrix::zeros(m.rows(), 0);
    }
    for mut v in cols {
        project_out(&mut v, &basis);
        let nv = norm(&v);
        if nv > rel_tol * scale {
            for x in v.iter_mut() {
                *x /= nv;
            }
            basis.push(v);
        }
    }
    from_columns(m.rows(), &basis)
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// (orthonormal) columns of `q`.
///
/// Coordinate vectors are projected against the growing basis and the one
/// with the largest remaining norm is taken at every step.
pub fn orthogonal_complement(q: &ComplexMatrix) -> ComplexMatrix {
    let n = q.rows();
    let target = n.saturating_sub(q.cols());
    let mut basis: Vec<Vec<C64>> = columns_of(q);
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(target);
    let mut candidates: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut e = vec![ZERO; n];
            e[i] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    for c in candidates.iter_mut() {
        project_out(c, &basis);
    }
    while out.len() < target {
        let (best, best_norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || best_norm <= 1e-8 {
            break;
        }
        let mut v = candidates.swap_remove(best);
        project_out(&mut v, &basis);
        let nv = norm(&v);
        for x in v.iter_mut() {
            *x /= nv;
        }
        for c in candidates.iter_mut() {
            let coef = dot(&v, c);
            for (x, y) in c.iter_mut().zip(&v) {
                *x -= coef * y;
            }
        }
        basis.push(v.clone());
        out.push(v);
    }
    from_columns(n, &out)
}
