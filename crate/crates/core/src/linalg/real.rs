//! Small dense real helpers for the least-squares polish.

/// Solves `A x = b` for a symmetric positive definite `A` (row-major,
/// `n x n`) by Cholesky. Returns `None` if a pivot is not positive.
pub(crate) fn cholesky_solve(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}

/// Gram matrix `JᵀJ` (row-major) and `Jᵀr` for `J` given as columns.
pub(crate) fn normal_equations(cols: &[Vec<f64>], r: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = cols.len();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            g[i * n + j] = s;
            g[j * n + i] = s;
        }
    }
    let jtr = cols
        .iter()
        .map(|c| c.iter().zip(r).map(|(a, b)| a * b).sum())
        .collect();
    (g, jtr)
}
