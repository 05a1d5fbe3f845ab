//! Constructive inclusions: corners, star-centers, segment witnesses,
//! deflated block families, the Tverberg lift and the essential-range
//! estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{
    find_scalar_point, sample_range, solve, solve_free, Certificate, Outcome, Rejection, SolverOptions, Target,
};
use crate::linalg::random::{derive_seed, random_isometry};
use crate::linalg::{
    compress, herm_eig, orthogonal_complement, orthonormal_basis, ComplexMatrix, HermitianMatrix, HermitianTuple,
    Isometry, C64,
};
use crate::par;
use crate::point::{unflatten_block, MatPoint, PointCloud};
use crate::ranges::{hermitian_embed, ComplexTuple, Interval};
use crate::tverberg::{tverberg_partition, PartitionResult, RealPointSet};

/// Largest cross norm accepted by [`segment_witness`].
pub const CROSS_TOL: f64 = 1e-8;
/// Relative rank threshold for deflation subspaces.
pub const DEFLATION_RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of the complement of an `r`-dimensional subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerSpec {
    pub r: usize,
    pub basis: Isometry,
}

impl CornerSpec {
    pub fn new(basis: Isometry) -> Self {
        Self {
            r: basis.n() - basis.k(),
            basis,
        }
    }

    /// Haar-random corner of co-dimension `r` in `C^n`.
    pub fn random(n: usize, r: usize, seed: u64) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidArgument(format!("corner of co-dimension {r} in dimension {n}")));
        }
        Ok(Self::new(random_isometry(n, n - r, seed)?))
    }

    /// Corner dropping the coordinates in `removed`.
    pub fn coordinate_complement(n: usize, removed: &[usize]) -> Self {
        let kept: Vec<usize> = (0..n).filter(|i| !removed.contains(i)).collect();
        Self::new(Isometry::coordinates(n, &kept))
    }

    /// Orthonormal basis of the removed subspace.
    pub fn removed(&self) -> ComplexMatrix {
        orthogonal_complement(self.basis.as_matrix())
    }
}

/// `Y*AY` for the corner basis `Y`.
pub fn corner_compress(a: &HermitianTuple, spec: &CornerSpec) -> Result<HermitianTuple> {
    compress(a, &spec.basis)
}

/// Orthonormal basis of a `dim`-dimensional subspace of the null space of
/// `m`, taken as the complement of its row space.
fn kernel_basis(m: &ComplexMatrix, dim: usize) -> Result<ComplexMatrix> {
    let p = m.cols();
    let rows = orthonormal_basis(&m.adjoint(), 1e-12);
    let null = orthogonal_complement(&rows);
    if dim > null.cols() {
        return Err(Error::Structural {
            required: dim,
            available: null.cols(),
            context: "null space of the block constraint matrix".into(),
        });
    }
    let w = null.columns(0, dim);
    let defect = m.matmul(&w).frobenius_norm();
    if defect > 1e-8 * m.frobenius_norm().max(1.0) || w.rows() != p {
        return Err(Error::Structural {
            required: dim,
            available: 0,
            context: "null space of the block constraint matrix".into(),
        });
    }
    Ok(w)
}

/// `X (W ⊗ I_q)` for `X = [X_1 | … | X_p]`.
fn combine_blocks(x: &ComplexMatrix, w: &ComplexMatrix, q: usize) -> ComplexMatrix {
    let (p, p2) = (w.rows(), w.cols());
    let n = x.rows();
    let mut out = ComplexMatrix::zeros(n, p2 * q);
    for l2 in 0..p2 {
        for l in 0..p {
            let coef = w[(l, l2)];
            if coef == C64::new(0.0, 0.0) {
                continue;
            }
            for t in 0..q {
                for s in 0..n {
                    out[(s, l2 * q + t)] += coef * x[(s, l * q + t)];
                }
            }
        }
    }
    out
}

/// Re-certifies `cert` at level `p_out` with a witness orthogonal to the
/// span of the (orthonormal) columns of `removed`.
///
/// The witness is `X (W ⊗ I_q)` where the columns of `W` span the null space
/// of the `(r·q) x p` matrix `[⟨k_i, X_l e_t⟩]`, so it exists whenever
/// `p_out ≤ p − q·r`.
pub fn avoid_subspace(a: &HermitianTuple, cert: &Certificate, removed: &ComplexMatrix, p_out: usize) -> Result<Certificate> {
    let (p, q) = (cert.p, cert.q());
    let x = cert.witness.as_matrix();
    if removed.rows() != x.rows() {
        return Err(Error::Dimension("removed subspace lives in a different dimension".into()));
    }
    if p_out == 0 || p_out > p {
        return Err(Error::InvalidArgument(format!("cannot re-certify level {p} at level {p_out}")));
    }
    let r = removed.cols();
    let kx = removed.adjoint_matmul(x);
    let mut qm = ComplexMatrix::zeros(r * q, p);
    for i in 0..r {
        for l in 0..p {
            for t in 0..q {
                qm[(i * q + t, l)] = kx[(i, l * q + t)];
            }
        }
    }
    let w = kernel_basis(&qm, p_out)?;
    let x2 = combine_blocks(x, &w, q);
    Certificate::from_witness(a, Isometry::from_matrix_unchecked(x2), p_out, cert.point.clone())
}

/// Certificate for `cert.point` in `Λ_{p_out,q}(Y*AY)`; exists for
/// `p_out ≤ p − q·r` (the scalar case `q = 1` is the rank-k inclusion).
pub fn corner_recertify(a: &HermitianTuple, cert: &Certificate, spec: &CornerSpec, p_out: usize) -> Result<Certificate> {
    let x2 = avoid_subspace(a, cert, &spec.removed(), p_out)?;
    let z = spec.basis.as_matrix().adjoint_matmul(x2.witness.as_matrix());
    let corner = corner_compress(a, spec)?;
    Certificate::from_witness(&corner, Isometry::from_matrix_unchecked(z), p_out, cert.point.clone())
}

/// A star-center candidate together with its certificate at the level
/// required for the constructive segment argument.
#[derive(Clone, Debug, PartialEq)]
pub struct StarCenter {
    /// The center as a point of `Λ_{p,q}`.
    pub point: MatPoint,
    /// Level of `certificate` (`pq(m+2)` with `q = 1` for scalar centers,
    /// `p(q²(m+1)+1)` for matrix centers).
    pub level: usize,
    pub certificate: Certificate,
    /// `n` is below the sufficiency bound for this level, so failure to find
    /// a center is not unexpected.
    pub below_bound: bool,
    pub p: usize,
    pub q: usize,
}

/// Scalar center level `pq(m+2)`.
pub fn scalar_center_level(m: usize, p: usize, q: usize) -> usize {
    p * q * (m + 2)
}

/// `(k−1)(m+1)²`, the dimension that guarantees `Λ_k(A) ≠ ∅`.
pub fn nonempty_bound(m: usize, k: usize) -> usize {
    (k.saturating_sub(1)) * (m + 1) * (m + 1)
}

/// `(m+1)k − m`, the sharper bound for `m ≤ 2`.
pub fn refined_nonempty_bound(m: usize, k: usize) -> usize {
    (m + 1) * k - m
}

/// Matrix center level `p(q²(m+1)+1)`.
pub fn matrix_center_level(m: usize, p: usize, q: usize) -> usize {
    p * (q * q * (m + 1) + 1)
}

/// `(c_1 I_q, …, c_m I_q)` with `c ∈ Λ_{pq(m+2)}(A)`.
pub fn star_center_scalar(a: &HermitianTuple, p: usize, q: usize, opts: &SolverOptions) -> Result<Outcome<StarCenter>> {
    let k = scalar_center_level(a.m(), p, q);
    if k > a.n() {
        return Err(Error::Structural {
            required: k,
            available: a.n(),
            context: "scalar star-center level pq(m+2)".into(),
        });
    }
    let below_bound = a.n() < nonempty_bound(a.m(), k);
    Ok(match find_scalar_point(a, k, opts)? {
        Outcome::Accepted((s, cert)) => Outcome::Accepted(StarCenter {
            point: MatPoint::scalar(&s.0, q),
            level: k,
            certificate: cert,
            below_bound,
            p,
            q,
        }),
        Outcome::Rejected(r) => Outcome::Rejected(r),
    })
}

/// Any point of `Λ_{p̃,q}(A)` with `p̃ = p(q²(m+1)+1)`.
pub fn star_center_matrix(a: &HermitianTuple, p: usize, q: usize, opts: &SolverOptions) -> Result<Outcome<StarCenter>> {
    let level = matrix_center_level(a.m(), p, q);
    if level * q > a.n() {
        return Err(Error::Structural {
            required: level * q,
            available: a.n(),
            context: "matrix star-center level p(q²(m+1)+1)".into(),
        });
    }
    Ok(match solve_free(a, level, q, opts)? {
        Outcome::Accepted(cert) => Outcome::Accepted(StarCenter {
            point: cert.point.clone(),
            level,
            certificate: cert,
            below_bound: false,
            p,
            q,
        }),
        Outcome::Rejected(r) => Outcome::Rejected(r),
    })
}

/// Scalar center of the Hermitian embedding of a complex tuple, at level
/// `2pq(m+1)`.
pub fn star_center_complex(t: &ComplexTuple, p: usize, q: usize, opts: &SolverOptions) -> Result<(HermitianTuple, Outcome<StarCenter>)> {
    let e = hermitian_embed(t);
    let out = star_center_scalar(&e, p, q, opts)?;
    Ok((e, out))
}

fn cross_norm(a: &HermitianTuple, x1: &ComplexMatrix, x2: &ComplexMatrix) -> f64 {
    let mut worst = x1.adjoint_matmul(x2).frobenius_norm();
    for h in a.members() {
        worst = worst.max(x1.adjoint_matmul(&h.as_matrix().matmul(x2)).frobenius_norm());
    }
    worst
}

/// Witness `√t·X_1 + √(1−t)·X_2` for `t·B + (1−t)·C`, valid when the two
/// witnesses are orthogonal and `A`-orthogonal.
pub fn segment_witness(a: &HermitianTuple, b: &Certificate, c: &Certificate, t: f64) -> Result<Certificate> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    if b.p != c.p || b.q() != c.q() || b.point.m() != c.point.m() {
        return Err(Error::Dimension("segment endpoints have different shapes".into()));
    }
    let (x1, x2) = (b.witness.as_matrix(), c.witness.as_matrix());
    if x1.rows() != a.n() || x2.rows() != a.n() {
        return Err(Error::Dimension("witness does not act on the tuple's space".into()));
    }
    let defect = cross_norm(a, x1, x2);
    if defect > CROSS_TOL {
        return Err(Error::CrossOrthogonality { defect });
    }
    let x = x1.scale_real(t.sqrt()).add(&x2.scale_real((1.0 - t).sqrt()));
    let point = b.point.convex_combination(&c.point, t)?;
    Certificate::from_witness(a, Isometry::from_matrix_unchecked(x), b.p, point)
}

/// Orthonormal basis of `span{X, A_1X, …, A_mX}` over all given witnesses.
pub fn deflation_subspace(a: &HermitianTuple, prior: &[&ComplexMatrix]) -> ComplexMatrix {
    let n = a.n();
    let mut cols = ComplexMatrix::zeros(n, 0);
    for x in prior {
        cols = cols.hstack(x);
        for h in a.members() {
            cols = cols.hstack(&h.as_matrix().matmul(x));
        }
    }
    orthonormal_basis(&cols, DEFLATION_RANK_TOL)
}

/// Solves for `target` in the corner orthogonal to the deflation subspace of
/// the prior witnesses, then lifts the witness back to `C^n`.
pub fn deflated_solve(
    a: &HermitianTuple,
    prior: &[&ComplexMatrix],
    p: usize,
    q: usize,
    target: &Target,
    opts: &SolverOptions,
) -> Result<Outcome> {
    if prior.is_empty() {
        return solve(a, p, q, target, opts);
    }
    let l = deflation_subspace(a, prior);
    let y = orthogonal_complement(&l);
    if y.cols() < p * q {
        let prior_cols: usize = prior.iter().map(|x| x.cols()).sum();
        return Err(Error::Structural {
            required: prior_cols * (a.m() + 1) + p * q,
            available: a.n(),
            context: "deflated solve needs room for the new block".into(),
        });
    }
    let y = Isometry::from_matrix_unchecked(y);
    let corner = compress(a, &y)?;
    let lift = |c: Certificate| -> Result<Certificate> {
        let x = y.as_matrix().matmul(c.witness.as_matrix());
        Certificate::from_witness(a, Isometry::from_matrix_unchecked(x), c.p, c.point)
    };
    Ok(match solve(&corner, p, q, target, opts)? {
        Outcome::Accepted(c) => Outcome::Accepted(lift(c)?),
        Outcome::Rejected(r) => Outcome::Rejected(Rejection {
            best: r.best.map(|b| lift(*b)).transpose()?.map(Box::new),
            ..r
        }),
    })
}

/// Segment point `t·B + (1−t)·center` built without any solver: the center's
/// certificate is moved off the deflation subspace of `B`'s witness and the
/// two witnesses are blended.
pub fn star_segment(a: &HermitianTuple, b: &Certificate, center: &StarCenter, t: f64) -> Result<Certificate> {
    let (p, q) = (b.p, b.q());
    if (center.p, center.q) != (p, q) {
        return Err(Error::Dimension("center was built for a different (p, q)".into()));
    }
    let l = deflation_subspace(a, &[b.witness.as_matrix()]);
    let c = if center.certificate.q() == 1 {
        // Scalar center: c·I_{pq} = I_p ⊗ c·I_q.
        let moved = avoid_subspace(a, &center.certificate, &l, p * q)?;
        Certificate::from_witness(a, moved.witness, p, center.point.clone())?
    } else {
        avoid_subspace(a, &center.certificate, &l, p)?
    };
    segment_witness(a, b, &c, t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FamilyMode {
    /// Every block compresses to the given point.
    Fixed(Vec<Vec<f64>>),
    /// Any accepted point per block.
    Free,
}

/// Mutually orthogonal and `A`-orthogonal `q`-dimensional compressions.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockFamily {
    pub q: usize,
    /// `p = 1` certificates, one per block.
    pub members: Vec<Certificate>,
    /// Largest observed `‖X_r*X_s‖_F` or `‖X_r*A_jX_s‖_F` for `r ≠ s`.
    pub cross_tol: f64,
}

impl BlockFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Recomputes the largest cross norm against `a`.
    pub fn cross_norm(&self, a: &HermitianTuple) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, x) in self.members.iter().enumerate() {
            for y in &self.members[r + 1..] {
                worst = worst.max(cross_norm(a, x.witness.as_matrix(), y.witness.as_matrix()));
            }
        }
        worst
    }
}

const FAMILY_STREAM: u64 = 0xfa;

/// Builds `d` blocks by successive deflated solves.
pub fn orthogonal_block_family(
    a: &HermitianTuple,
    q: usize,
    d: usize,
    mode: &FamilyMode,
    opts: &SolverOptions,
) -> Result<BlockFamily> {
    let target = match mode {
        FamilyMode::Free => Target::Free,
        FamilyMode::Fixed(flat) => {
            let coords: Vec<f64> = flat.iter().flatten().copied().collect();
            Target::Fixed(MatPoint::from_flat(&coords, a.m(), q)?)
        }
    };
    let mut members: Vec<Certificate> = Vec::with_capacity(d);
    for stage in 0..d {
        let stage_opts = opts.clone().with_seed(derive_seed(opts.seed, FAMILY_STREAM, stage as u64));
        let prior: Vec<&ComplexMatrix> = members.iter().map(|c| c.witness.as_matrix()).collect();
        match deflated_solve(a, &prior, 1, q, &target, &stage_opts)? {
            Outcome::Accepted(c) => members.push(c),
            Outcome::Rejected(r) => {
                return Err(Error::StageFailed {
                    stage,
                    best_residual: r.best_residual,
                })
            }
        }
    }
    let mut fam = BlockFamily {
        q,
        members,
        cross_tol: 0.0,
    };
    fam.cross_tol = fam.cross_norm(a);
    Ok(fam)
}

/// Number of blocks the Tverberg lift needs: `(p−1)(q²m+1)+1`.
pub fn tverberg_count(m: usize, p: usize, q: usize) -> usize {
    (p - 1) * (q * q * m + 1) + 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct TverbergLift {
    pub certificate: Certificate,
    pub family: BlockFamily,
    pub partition: PartitionResult,
}

/// Certificate at level `p` for a point common to the hulls of a Tverberg
/// partition of `d` deflated blocks, with witness `[X_1 | … | X_p]` where
/// `X_ℓ = Σ_{r ∈ I_ℓ} √λ_r X_r`.
pub fn tverberg_lift(a: &HermitianTuple, q: usize, p: usize, opts: &SolverOptions) -> Result<TverbergLift> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument("p and q must be positive".into()));
    }
    let m = a.m();
    let d = tverberg_count(m, p, q);
    let need = d * q * (m + 1) + q;
    if a.n() < need {
        return Err(Error::Structural {
            required: need,
            available: a.n(),
            context: format!("{d} deflated blocks of size {q}"),
        });
    }
    let family = orthogonal_block_family(a, q, d, &FamilyMode::Free, opts)?;
    let dim = m * q * q;
    let points: Vec<Vec<f64>> = family.members.iter().map(|c| c.point.flatten()).collect();
    let set = RealPointSet::new(dim, points)?;
    let partition = tverberg_partition(&set, p)?;
    let n = a.n();
    let mut x = ComplexMatrix::zeros(n, 0);
    for (part, w) in partition.parts.iter().zip(&partition.weights) {
        let mut xl = ComplexMatrix::zeros(n, q);
        for (&r, &lambda) in part.iter().zip(w) {
            xl.axpy(C64::new(lambda.sqrt(), 0.0), family.members[r].witness.as_matrix());
        }
        x = x.hstack(&xl);
    }
    let point = MatPoint::from_flat(&partition.common_point, m, q)?;
    let certificate = Certificate::from_witness(a, Isometry::from_matrix_unchecked(x), p, point)?;
    Ok(TverbergLift {
        certificate,
        family,
        partition,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EssentialOptions {
    /// Sampled points per level.
    pub n_points: usize,
    pub n_directions: usize,
    /// Refine each support value by bisection on hyperplane levels.
    pub seek_support: bool,
    pub bisection_tol: f64,
    /// Restart budget for each bisection probe.
    pub seek_restarts: usize,
}

impl Default for EssentialOptions {
    fn default() -> Self {
        Self {
            n_points: 40,
            n_directions: 64,
            seek_support: true,
            bisection_tol: 1e-8,
            seek_restarts: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EssentialEstimate {
    pub q: usize,
    pub directions: Vec<Vec<f64>>,
    /// One cloud per level `r = 1..=r_max` (possibly empty).
    pub clouds: Vec<PointCloud>,
    /// `support[r-1][i]`: best certified support value of level `r` in
    /// direction `i` (`-inf` when nothing was certified).
    pub support: Vec<Vec<f64>>,
    /// Running minimum of `support` over levels `1..=r`.
    pub intersection: Vec<Vec<f64>>,
    /// Levels whose cloud came back empty.
    pub empty_levels: Vec<usize>,
}

impl EssentialEstimate {
    /// For one real coordinate (`m = q = 1`): `[−h(−1), h(+1)]` after level `r`.
    pub fn interval(&self, r: usize) -> Option<Interval> {
        if self.directions.first()?.len() != 1 || r == 0 || r > self.intersection.len() {
            return None;
        }
        let h = &self.intersection[r - 1];
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for (u, v) in self.directions.iter().zip(h) {
            if u[0] > 0.0 {
                hi = *v / u[0];
            } else {
                lo = *v / u[0] + 0.0;
            }
        }
        Some(Interval { lo, hi, empty: hi < lo })
    }
}

fn halton(index: usize, base: usize) -> f64 {
    let (mut f, mut r, mut i) = (1.0, 0.0, index);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Deterministic unit directions in `R^dim`: `±1` for `dim = 1`, equally
/// spaced angles for `dim = 2`, otherwise `±e_i` followed by normalized
/// Halton points.
pub fn support_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count);
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    if out.len() < count {
                        let mut e = vec![0.0; dim];
                        e[i] = s;
                        out.push(e);
                    }
                }
            }
            let mut idx = 1;
            while out.len() < count {
                let v: Vec<f64> = (0..dim)
                    .map(|j| 2.0 * halton(idx, PRIMES[j % PRIMES.len()]) - 1.0)
                    .collect();
                idx += 1;
                let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if nv > 1e-6 {
                    out.push(v.into_iter().map(|x| x / nv).collect());
                }
            }
            out
        }
    }
}

/// Upper bound on the support of `Λ_{r,q}(A)` in direction `u` (flattened):
/// `λ_r(Σ u_j A_j)` for `q = 1`, else `(q/r) Σ_{i≤r} λ_i(Σ_j U_jᵀ ⊗ A_j)`.
pub fn support_upper_bound(a: &HermitianTuple, r: usize, q: usize, u: &[f64]) -> Result<f64> {
    let m = a.m();
    if u.len() != m * q * q {
        return Err(Error::Dimension("direction length".into()));
    }
    if q == 1 {
        let ev = herm_eig(&a.combination(u))?.values;
        return Ok(ev[r - 1]);
    }
    let n = a.n();
    let mut big = ComplexMatrix::zeros(n * q, n * q);
    for (j, h) in a.members().iter().enumerate() {
        let uj = unflatten_block(&u[j * q * q..(j + 1) * q * q], q);
        for s in 0..q {
            for t in 0..q {
                // (Uᵀ ⊗ A)[(s,·),(t,·)] = U[t,s] A.
                let c = uj[(t, s)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..n {
                    for k in 0..n {
                        big[(s * n + i, t * n + k)] += c * h.as_matrix()[(i, k)];
                    }
                }
            }
        }
    }
    let ev = herm_eig(&HermitianMatrix::new_unchecked(big.hermitian_part()))?.values;
    Ok(q as f64 / r as f64 * ev[..r].iter().sum::<f64>())
}

const ESSENTIAL_STREAM: u64 = 0xe55;

/// Finite-truncation estimate of `⋂_r cl Λ_{r,q}(A)` through support
/// functions on a fixed direction set.
pub fn essential_estimate(
    a: &HermitianTuple,
    q: usize,
    r_max: usize,
    opts: &SolverOptions,
    eopts: &EssentialOptions,
) -> Result<EssentialEstimate> {
    if r_max == 0 || q == 0 {
        return Err(Error::InvalidArgument("r_max and q must be positive".into()));
    }
    if 2 * r_max * q > a.n() {
        return Err(Error::Structural {
            required: 2 * r_max * q,
            available: a.n(),
            context: "essential estimate keeps r_max*q <= n/2".into(),
        });
    }
    let dim = a.m() * q * q;
    let directions = support_directions(dim, eopts.n_directions);
    let per_level = par::map_indexed(r_max, |i| -> Result<(PointCloud, Vec<f64>)> {
        let r = i + 1;
        let level_opts = opts.clone().with_seed(derive_seed(opts.seed, ESSENTIAL_STREAM, r as u64));
        let mut cloud = sample_range(a, r, q, eopts.n_points, &level_opts)?;
        let mut support: Vec<f64> = directions.iter().map(|u| cloud.support(u)).collect();
        if eopts.seek_support && !cloud.is_empty() {
            let probe_opts = SolverOptions {
                max_restarts: eopts.seek_restarts,
                ..level_opts.clone()
            };
            for (di, u) in directions.iter().enumerate() {
                let (found, cert) = seek_support(a, r, q, u, support[di], &probe_opts, eopts, di)?;
                support[di] = found;
                if let Some(c) = cert {
                    cloud.points.push(c.point.clone());
                    if let Some(cs) = cloud.certificates.as_mut() {
                        cs.push(c);
                    }
                }
            }
        }
        Ok((cloud, support))
    });
    let mut clouds = Vec::with_capacity(r_max);
    let mut support = Vec::with_capacity(r_max);
    let mut empty_levels = Vec::new();
    for (i, res) in per_level.into_iter().enumerate() {
        let (cloud, s) = res?;
        if cloud.is_empty() {
            empty_levels.push(i + 1);
        }
        clouds.push(cloud);
        support.push(s);
    }
    let mut intersection: Vec<Vec<f64>> = Vec::with_capacity(r_max);
    for (i, s) in support.iter().enumerate() {
        let row = if i == 0 {
            s.clone()
        } else if s.iter().all(|v| v.is_finite()) {
            intersection[i - 1].iter().zip(s).map(|(a, b)| a.min(*b)).collect()
        } else {
            // An empty level carries no information; keep the previous row.
            intersection[i - 1].clone()
        };
        intersection.push(row);
    }
    Ok(EssentialEstimate {
        q,
        directions,
        clouds,
        support,
        intersection,
        empty_levels,
    })
}

/// Bisection on `⟨u, B⟩ = t` between a certified level and the eigenvalue
/// bound. Returns the highest certified level and its certificate.
#[allow(clippy::too_many_arguments)]
fn seek_support(
    a: &HermitianTuple,
    r: usize,
    q: usize,
    u: &[f64],
    start: f64,
    opts: &SolverOptions,
    eopts: &EssentialOptions,
    stream: usize,
) -> Result<(f64, Option<Certificate>)> {
    let mut lo = start;
    let mut hi = support_upper_bound(a, r, q, u)?;
    let tol = eopts.bisection_tol * a.scale();
    let mut best = None;
    let mut step = 0u64;
    // Try the bound itself first: it is attained for a single Hermitian matrix.
    let mut probe = hi;
    while hi - lo > tol {
        let o = opts
            .clone()
            .with_seed(derive_seed(opts.seed, stream as u64 + 1, step));
        step += 1;
        let target = Target::Hyperplane {
            normal: u.to_vec(),
            level: probe,
        };
        match solve(a, r, q, &target, &o)? {
            Outcome::Accepted(c) => {
                let v: f64 = c.point.flatten().iter().zip(u).map(|(x, y)| x * y).sum();
                lo = lo.max(v.min(probe));
                best = Some(c);
                if probe >= hi {
                    break;
                }
            }
            Outcome::Rejected(_) => hi = probe,
        }
        probe = 0.5 * (lo + hi);
    }
    Ok((lo, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{membership, residual};
    use crate::linalg::random::{gue_tuple, rng};
    use crate::linalg::{direct_sum, kron_block};
    use crate::ranges::rank_k_interval;

    fn quick() -> SolverOptions {
        SolverOptions {
            max_restarts: 20,
            ..SolverOptions::default()
        }
    }

    fn spiked() -> HermitianTuple {
        let mut d = vec![5.0];
        d.extend([1.0; 5]);
        d.extend([0.0; 6]);
        HermitianTuple::diagonal(&[d]).unwrap()
    }

    #[test]
    fn corner_spectra() {
        let a = gue_tuple(2, 6, 1);
        let u = CornerSpec::random(6, 0, 3).unwrap();
        let c = corner_compress(&a, &u).unwrap();
        for (x, y) in a.members().iter().zip(c.members()) {
            let (ex, ey) = (herm_eig(x).unwrap().values, herm_eig(y).unwrap().values);
            for (s, t) in ex.iter().zip(&ey) {
                assert!((s - t).abs() < 1e-10);
            }
        }
        let d = HermitianTuple::diagonal(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let c = corner_compress(&d, &CornerSpec::coordinate_complement(4, &[1])).unwrap();
        let ev = herm_eig(c.member(0)).unwrap().values;
        assert_eq!(ev, vec![4.0, 3.0, 1.0]);
        let y = CornerSpec::random(6, 2, 9).unwrap();
        let c = corner_compress(&a, &y).unwrap();
        for (x, z) in a.members().iter().zip(c.members()) {
            let (ex, ez) = (herm_eig(x).unwrap().values, herm_eig(z).unwrap().values);
            for i in 0..4 {
                assert!(ex[i] >= ez[i] - 1e-10 && ez[i] >= ex[i + 2] - 1e-10);
            }
        }
    }

    #[test]
    fn corner_recertification_rank_k() {
        let a = gue_tuple(2, 10, 2);
        let cert = solve_free(&a, 4, 1, &quick()).unwrap().into_accepted().unwrap();
        for s in 0..5 {
            let spec = CornerSpec::random(10, 2, 100 + s).unwrap();
            let c2 = corner_recertify(&a, &cert, &spec, 2).unwrap();
            let corner = corner_compress(&a, &spec).unwrap();
            c2.revalidate(&corner, 1e-8).unwrap();
        }
    }

    #[test]
    fn corner_recertification_matrix() {
        // p = 3, q = 2, r = 1: level 3 − 2 = 1 survives.
        let a = gue_tuple(1, 10, 4);
        let cert = solve_free(&a, 3, 2, &quick()).unwrap().into_accepted().unwrap();
        let spec = CornerSpec::random(10, 1, 5).unwrap();
        let c2 = corner_recertify(&a, &cert, &spec, 1).unwrap();
        c2.revalidate(&corner_compress(&a, &spec).unwrap(), 1e-8).unwrap();
        assert!(corner_recertify(&a, &cert, &spec, 2).is_err());
    }

    #[test]
    fn scalar_center_cases() {
        let a = HermitianTuple::scalar(&[1.0, -1.0], 8).unwrap();
        let c = star_center_scalar(&a, 1, 2, &quick()).unwrap().into_accepted().unwrap();
        assert!(c.point.distance(&MatPoint::scalar(&[1.0, -1.0], 2)) < 1e-12);

        let d = HermitianTuple::diagonal(&[(1..=9).map(f64::from).collect()]).unwrap();
        let c = star_center_scalar(&d, 1, 1, &quick()).unwrap().into_accepted().unwrap();
        assert_eq!(c.level, 3);
        let v = c.point.scalars().unwrap()[0];
        assert!(rank_k_interval(d.member(0), 3).unwrap().contains(v, 1e-6));
        assert!(star_center_scalar(&gue_tuple(2, 3, 0), 1, 1, &quick()).is_err());
    }

    #[test]
    fn level_formulas_agree() {
        for m in 1..5 {
            for p in 1..4 {
                assert_eq!(matrix_center_level(m, p, 1), scalar_center_level(m, p, 1));
                assert_eq!(2 * p * 2 * (m + 1), scalar_center_level(2 * m, p, 2));
            }
        }
        assert_eq!(matrix_center_level(1, 1, 2), 9);
        assert_eq!(nonempty_bound(2, 2), 9);
        assert_eq!(refined_nonempty_bound(1, 3), 5);
        assert_eq!((scalar_center_level(2, 1, 1) - 1) * 9, 27);
        assert_eq!(tverberg_count(1, 2, 1), 3);
        assert_eq!(tverberg_count(1, 2, 2), 6);
    }

    #[test]
    fn planted_matrix_center() {
        // m = 1, p = 1, q = 2: level 1·(4·2+1) = 9.
        let b0 = gue_tuple(1, 2, 8);
        let a = direct_sum(&kron_block(9, &b0).unwrap(), &gue_tuple(1, 3, 9)).unwrap();
        let c = star_center_matrix(&a, 1, 2, &quick()).unwrap().into_accepted().unwrap();
        assert_eq!(c.level, 9);
        assert!(c.certificate.residual <= 1e-8);
    }

    #[test]
    fn segment_endpoints_and_planted_midpoint() {
        let (p, q) = (2, 2);
        let b0 = gue_tuple(2, q, 1);
        let c0 = gue_tuple(2, q, 2);
        let a = direct_sum(&kron_block(p, &b0).unwrap(), &kron_block(p, &c0).unwrap()).unwrap();
        let n = a.n();
        let xb = Isometry::coordinates(n, &(0..p * q).collect::<Vec<_>>());
        let xc = Isometry::coordinates(n, &(p * q..2 * p * q).collect::<Vec<_>>());
        let pb = MatPoint::new(b0.members().to_vec()).unwrap();
        let pc = MatPoint::new(c0.members().to_vec()).unwrap();
        let cb = Certificate::from_witness(&a, xb, p, pb.clone()).unwrap();
        let cc = Certificate::from_witness(&a, xc, p, pc.clone()).unwrap();
        let s1 = segment_witness(&a, &cb, &cc, 1.0).unwrap();
        assert!((s1.residual - cb.residual).abs() < 1e-12);
        assert_eq!(s1.witness, cb.witness);
        let s0 = segment_witness(&a, &cb, &cc, 0.0).unwrap();
        assert!((s0.residual - cc.residual).abs() < 1e-12);
        for t in [0.25, 0.5, 0.75] {
            let s = segment_witness(&a, &cb, &cc, t).unwrap();
            assert!(s.residual <= 1e-10);
            let expect = pb.convex_combination(&pc, t).unwrap();
            assert!(s.point.distance(&expect) < 1e-15);
            s.revalidate(&a, 1e-9).unwrap();
        }
        assert!(matches!(
            segment_witness(&a, &cb, &cb, 0.5),
            Err(Error::CrossOrthogonality { .. })
        ));
    }

    #[test]
    fn deflated_planted_second_copy() {
        let (p, q) = (2, 1);
        let b0 = gue_tuple(2, q, 3);
        let block = kron_block(p, &b0).unwrap();
        let zeros = HermitianTuple::scalar(&[0.0, 0.0], 2).unwrap();
        let a = direct_sum(&direct_sum(&block, &block).unwrap(), &zeros).unwrap();
        let target = Target::Fixed(MatPoint::new(b0.members().to_vec()).unwrap());
        let first = Isometry::coordinates(a.n(), &[0, 1]);
        let c = deflated_solve(&a, &[first.as_matrix()], p, q, &target, &quick())
            .unwrap()
            .into_accepted()
            .unwrap();
        assert!(cross_norm(&a, first.as_matrix(), c.witness.as_matrix()) <= 1e-12);
        c.revalidate(&a, 1e-8).unwrap();
    }

    #[test]
    fn deflated_family_random() {
        let m = 2;
        let d = 3;
        let n = d * (m + 1) + 1;
        let a = gue_tuple(m, n, 12);
        let fam = orthogonal_block_family(&a, 1, d, &FamilyMode::Free, &quick()).unwrap();
        assert_eq!(fam.len(), 3);
        // Direct recomputation of every X_r*A_jX_s.
        for r in 0..d {
            for s in 0..d {
                if r == s {
                    continue;
                }
                let (x, y) = (fam.members[r].witness.as_matrix(), fam.members[s].witness.as_matrix());
                assert!(x.adjoint_matmul(y).frobenius_norm() <= 1e-10);
                for h in a.members() {
                    assert!(x.adjoint_matmul(&h.as_matrix().matmul(y)).frobenius_norm() <= 1e-10);
                }
            }
        }
        assert!(fam.cross_tol <= 1e-10);
    }

    #[test]
    fn family_on_diagonal_and_planted() {
        let a = HermitianTuple::diagonal(&[(1..=12).map(f64::from).collect()]).unwrap();
        let fam = orthogonal_block_family(&a, 1, 6, &FamilyMode::Free, &quick()).unwrap();
        assert_eq!(fam.len(), 6);
        assert!(fam.cross_tol <= 1e-10);

        let c0 = gue_tuple(1, 2, 5);
        let d = 3;
        let padded = direct_sum(&kron_block(d, &c0).unwrap(), &HermitianTuple::scalar(&[0.0], 3).unwrap()).unwrap();
        let flat = vec![MatPoint::new(c0.members().to_vec()).unwrap().flatten()];
        let fam = orthogonal_block_family(&padded, 2, d, &FamilyMode::Fixed(flat), &quick());
        // Each stage removes 2·(m+1) = 4 dimensions from 9; the third stage
        // has only 1 left, which cannot hold a 2-dimensional block.
        assert!(matches!(fam, Err(Error::Structural { .. })));

        let roomy = direct_sum(&kron_block(6, &c0).unwrap(), &HermitianTuple::scalar(&[0.0], 1).unwrap()).unwrap();
        let flat = vec![MatPoint::new(c0.members().to_vec()).unwrap().flatten()];
        let fam = orthogonal_block_family(&roomy, 2, 3, &FamilyMode::Fixed(flat), &quick()).unwrap();
        for c in &fam.members {
            c.revalidate(&roomy, 1e-8).unwrap();
        }
    }

    #[test]
    fn fixed_family_certifies_kron_prefix() {
        let a = gue_tuple(1, 16, 3);
        let center = star_center_scalar(&a, 1, 1, &quick()).unwrap().into_accepted().unwrap();
        let c = center.point.scalars().unwrap();
        let fam = orthogonal_block_family(&a, 1, 3, &FamilyMode::Fixed(vec![c.clone()]), &quick()).unwrap();
        let mut x = ComplexMatrix::zeros(16, 0);
        for m in &fam.members {
            x = x.hstack(m.witness.as_matrix());
        }
        let r = residual(&a, &Isometry::from_matrix_unchecked(x), 3, &MatPoint::scalar(&c, 1)).unwrap();
        assert!(r <= 1e-7, "{r}");
    }

    #[test]
    fn tverberg_lift_diagonal() {
        let a = HermitianTuple::diagonal(&[(1..=12).map(f64::from).collect()]).unwrap();
        let lift = tverberg_lift(&a, 1, 2, &quick()).unwrap();
        let c = &lift.certificate;
        assert!(c.witness.defect() <= 1e-8);
        assert!(c.residual <= 1e-8);
        c.revalidate(&a, 1e-8).unwrap();
        let v = c.point.scalars().unwrap()[0];
        let iv = rank_k_interval(a.member(0), 2).unwrap();
        assert!(iv.contains(v, 1e-6));
        // The middle of three values on a line is the Radon point.
        let mut vals: Vec<f64> = lift.family.members.iter().map(|m| m.point.scalars().unwrap()[0]).collect();
        vals.sort_by(f64::total_cmp);
        assert!((v - vals[1]).abs() < 1e-8);
    }

    #[test]
    fn tverberg_lift_matrix_blocks() {
        let a = gue_tuple(1, 26, 7);
        let lift = tverberg_lift(&a, 2, 2, &quick()).unwrap();
        assert!(lift.partition.scanned <= 31);
        assert!(lift.certificate.residual <= 1e-8);
        assert!(lift.certificate.witness.defect() <= 1e-8);
        assert!(tverberg_lift(&gue_tuple(1, 25, 7), 2, 2, &quick()).is_err());
    }

    #[test]
    fn star_segment_is_constructive() {
        let a = gue_tuple(2, 20, 31);
        let center = star_center_scalar(&a, 1, 1, &quick()).unwrap().into_accepted().unwrap();
        let cloud = sample_range(&a, 1, 1, 5, &quick()).unwrap();
        for b in cloud.certificates.as_ref().unwrap() {
            for t in [0.25, 0.5, 0.75] {
                let s = star_segment(&a, b, &center, t).unwrap();
                s.revalidate(&a, 1e-8).unwrap();
                let expect = b.point.convex_combination(&center.point, t).unwrap();
                assert!(s.point.distance(&expect) < 1e-14);
            }
        }
    }

    #[test]
    fn star_segment_matrix_center() {
        let (p, q) = (1, 2);
        let b0 = gue_tuple(1, 2, 8);
        let a = direct_sum(&kron_block(9, &b0).unwrap(), &gue_tuple(1, 6, 2)).unwrap();
        let center = star_center_matrix(&a, p, q, &quick()).unwrap().into_accepted().unwrap();
        let b = solve_free(&a, p, q, &quick().with_seed(9)).unwrap().into_accepted().unwrap();
        let s = star_segment(&a, &b, &center, 0.5).unwrap();
        s.revalidate(&a, 1e-8).unwrap();
    }

    #[test]
    fn star_segment_scalar_center_q2() {
        let (p, q) = (1, 2);
        let a = gue_tuple(1, 16, 5);
        let center = star_center_scalar(&a, p, q, &quick()).unwrap().into_accepted().unwrap();
        assert_eq!(center.level, 6);
        let b = solve_free(&a, p, q, &quick().with_seed(4)).unwrap().into_accepted().unwrap();
        let s = star_segment(&a, &b, &center, 0.5).unwrap();
        s.revalidate(&a, 1e-8).unwrap();
        let check = membership(&a, &s.point, p, &quick()).unwrap();
        assert!(check.is_accepted());
    }

    #[test]
    fn essential_spiked_interval() {
        let a = spiked();
        let est = essential_estimate(&a, 1, 6, &quick(), &EssentialOptions::default()).unwrap();
        let i1 = est.interval(1).unwrap();
        assert!((i1.lo - 0.0).abs() < 1e-6 && (i1.hi - 5.0).abs() < 1e-6, "{i1:?}");
        for r in 2..=6 {
            let iv = est.interval(r).unwrap();
            assert!(iv.lo.abs() < 1e-6 && (iv.hi - 1.0).abs() < 1e-6, "r={r} {iv:?}");
        }
        for w in est.intersection.windows(2) {
            for (x, y) in w[0].iter().zip(&w[1]) {
                assert!(*y <= x + 1e-6);
            }
        }
    }

    #[test]
    fn essential_scalar_tuple() {
        let a = HermitianTuple::scalar(&[2.0, -1.0], 8).unwrap();
        let est = essential_estimate(&a, 1, 3, &quick(), &EssentialOptions { n_points: 5, ..Default::default() }).unwrap();
        for cloud in &est.clouds {
            for p in &cloud.points {
                assert!(p.distance(&MatPoint::scalar(&[2.0, -1.0], 1)) < 1e-10);
            }
        }
        for (u, h) in est.directions.iter().zip(est.intersection.last().unwrap()) {
            assert!((h - (2.0 * u[0] - u[1])).abs() < 1e-8);
        }
    }

    #[test]
    fn essential_corner_invariance() {
        let a = spiked();
        let spec = CornerSpec::random(12, 1, 77).unwrap();
        let c = corner_compress(&a, &spec).unwrap();
        let e1 = essential_estimate(&a, 1, 5, &quick(), &EssentialOptions::default()).unwrap();
        let e2 = essential_estimate(&c, 1, 5, &quick(), &EssentialOptions::default()).unwrap();
        let (i1, i2) = (e1.interval(5).unwrap(), e2.interval(5).unwrap());
        assert!((i1.lo - i2.lo).abs() <= 2e-6 && (i1.hi - i2.hi).abs() <= 2e-6, "{i1:?} {i2:?}");
    }

    #[test]
    fn upper_bound_dominates_cloud() {
        let a = gue_tuple(1, 8, 3);
        let cloud = sample_range(&a, 2, 2, 10, &quick()).unwrap();
        let mut r = rng(5);
        for _ in 0..10 {
            let u: Vec<f64> = crate::linalg::random::unit_vector(4, &mut r).iter().map(|z| z.re).collect();
            let h = support_upper_bound(&a, 2, 2, &u).unwrap();
            assert!(cloud.support(&u) <= h + 1e-9);
        }
    }

    #[test]
    fn directions_are_unit_and_deterministic() {
        for dim in 1..6 {
            let d = support_directions(dim, 64);
            assert_eq!(d, support_directions(dim, 64));
            for u in &d {
                assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
