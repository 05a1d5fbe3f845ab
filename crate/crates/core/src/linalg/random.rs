//! Seeded random matrices: complex Gaussians, Haar isometries and the GUE
//! ensemble.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::{qr, HermitianMatrix, HermitianTuple, Isometry};
use crate::error::{Error, Result};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream tag and an index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian entry (`E|z|^2 = 1`).
pub fn gaussian_entry<R: Rng + ?Sized>(r: &mut R) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, r: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_entry(r))
}

/// Haar-distributed `n x k` isometry from the QR factor of a complex
/// Gaussian matrix (R diagonal made positive).
pub fn random_isometry(n: usize, k: usize, seed: u64) -> Result<Isometry> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "isometry with {k} columns in dimension {n}"
        )));
    }
    let mut r = rng(seed);
    isometry_from_rng(n, k, &mut r)
}

pub fn isometry_from_rng<R: Rng + ?Sized>(n: usize, k: usize, r: &mut R) -> Result<Isometry> {
    loop {
        let g = complex_gaussian(n, k, r);
        // Rank deficiency has probability zero; redraw if it ever happens.
        if let Ok(q) = qr::orthonormalize(&g) {
            return Ok(q);
        }
    }
}

/// Uniform random unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, r: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian_entry(r)).collect();
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-300 {
            return v.into_iter().map(|z| z / nv).collect();
        }
    }
}

/// GUE-normalized Hermitian matrix: Hermitized complex Gaussian scaled by
/// `1/sqrt(n)`.
pub fn gue_matrix<R: Rng + ?Sized>(n: usize, r: &mut R) -> HermitianMatrix {
    let g = complex_gaussian(n, n, r);
    let s = 1.0 / (n.max(1) as f64).sqrt();
    HermitianMatrix::new_unchecked(g.hermitian_part().scale_real(s))
}

pub fn gue_tuple(m: usize, n: usize, seed: u64) -> HermitianTuple {
    let mut r = rng(seed);
    let members = (0..m).map(|_| gue_matrix(n, &mut r)).collect();
    HermitianTuple::new_unchecked(n, members)
}

/// Random non-Hermitian complex matrix with standard Gaussian entries.
pub fn ginibre(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed);
    complex_gaussian(n, n, &mut r)
}
