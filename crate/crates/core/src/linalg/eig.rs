//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation to the
//! resulting real symmetric 2x2 block. The sweep stops when the off-diagonal
//! Frobenius norm drops below `1e-12 * ‖A‖_F`.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::HermitianMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 30;
const REL_TOL: f64 = 1e-12;

/// Eigenvalues in descending order and the matching unitary eigenvector
/// matrix (column `i` belongs to `values[i]`).
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn herm_eig(a: &HermitianMatrix) -> Result<Eigen> {
    let mut m = a.as_matrix().hermitian_part();
    let n = m.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = REL_TOL * scale;

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    if !converged {
        let off = off_diagonal_norm(&m);
        if off > threshold {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    Ok(Eigen {
        values: order.iter().map(|&i| diag[i]).collect(),
        vectors: v.select_columns(&order),
    })
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    // Skip rotations that cannot change anything at working precision.
    if g <= f64::EPSILON * 1e-3 * (alpha.abs() + beta.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g;
    let theta = (beta - alpha) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();

    // J = [[c, s], [-s * conj(phase), c * conj(phase)]] acting on (p, q).
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -pc * s;
    let jqq = pc * c;

    let n = m.rows();
    // Columns: M <- M J.
    for k in 0..n {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * jpp + mq * jqp;
        m[(k, q)] = mp * jpq + mq * jqq;
    }
    // Rows: M <- J^* M.
    for k in 0..n {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = jpp.conj() * mp + jqp.conj() * mq;
        m[(q, k)] = jpq.conj() * mp + jqq.conj() * mq;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * jpp + vq * jqp;
        v[(k, q)] = vp * jpq + vq * jqq;
    }
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(a: &HermitianMatrix) -> Result<f64> {
    Ok(herm_eig(a)?.values.first().copied().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gue_matrix, rng};

    fn reconstruction_residual(a: &HermitianMatrix, e: &Eigen) -> f64 {
        let av = a.as_matrix().matmul(&e.vectors);
        let mut vl = e.vectors.clone();
        for j in 0..vl.cols() {
            for i in 0..vl.rows() {
                vl[(i, j)] *= e.values[j];
            }
        }
        av.sub(&vl).frobenius_norm()
    }

    #[test]
    fn diagonal_input_sorts_descending() {
        let a = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let e = herm_eig(&a).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        // Columns are a permutation of the identity.
        for j in 0..3 {
            let col = e.vectors.column(j);
            let ones = col.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-15).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let a = HermitianMatrix::identity(4);
        let e = herm_eig(&a).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(e.vectors.isometry_defect() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut r = rng(11);
        let a = gue_matrix(6, &mut r);
        let e = herm_eig(&a).unwrap();
        let scale = a.as_matrix().frobenius_norm().max(1.0);
        assert!(reconstruction_residual(&a, &e) <= 1e-10 * scale);
        assert!(e.vectors.isometry_defect() <= 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn reconstruction_over_ensemble() {
        let mut r = rng(2024);
        for trial in 0..1000 {
            let n = 1 + trial % 32;
            let a = gue_matrix(n, &mut r).scale(1.0 + (trial % 7) as f64 * 10.0);
            let e = herm_eig(&a).unwrap();
            let scale = a.as_matrix().frobenius_norm().max(1.0);
            let res = reconstruction_residual(&a, &e);
            assert!(res <= 1e-10 * scale, "trial {trial}: residual {res}");
        }
    }

    #[test]
    fn complex_two_by_two() {
        // [[0, 1-i],[1+i, 0]] has eigenvalues ±sqrt(2).
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![ZERO, C64::new(1.0, -1.0), C64::new(1.0, 1.0), ZERO],
        )
        .unwrap();
        let a = HermitianMatrix::new(m).unwrap();
        let e = herm_eig(&a).unwrap();
        assert!((e.values[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!((e.values[1] + 2f64.sqrt()).abs() < 1e-14);
    }
}
