//! Numerical membership in `Λ_{p,q}(A)`.
//!
//! The solver minimizes `f(X) = Σ_j ‖X*A_jX − I_p⊗B_j‖_F²` over `n x pq`
//! isometries. For a fixed `X` the best `B` is available in closed form for
//! every supported target (fixed, free, or free on an affine hyperplane), so
//! the objective is a function of `X` alone. Each restart runs projected
//! gradient descent with a QR retraction and Armijo backtracking, then a
//! damped Gauss–Newton polish in tangent coordinates.
//!
//! Acceptance is one-sided: a [`Certificate`] proves membership up to its
//! residual, a [`Rejection`] proves nothing. Points on the boundary of the
//! range may only be reachable with residual of order `accept_tol`, so the
//! accepted set is the `accept_tol`-fattened range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::qr::orthonormal_columns;
use crate::linalg::random::{derive_seed, random_isometry};
use crate::linalg::real::{cholesky_solve, normal_equations};
use crate::linalg::{
    compress, orthogonal_complement, ComplexMatrix, HermitianMatrix, HermitianTuple, Isometry, C64,
    ISOMETRY_TOL,
};
use crate::par;
use crate::point::{flatten_block, unflatten_block, CloudMeta, MatPoint, PointCloud, ScalarPoint};

/// Witness `X` for `X*A_jX ≈ I_p ⊗ B_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub point: MatPoint,
    pub p: usize,
    pub witness: Isometry,
    pub residual: f64,
}

impl Certificate {
    /// Builds a certificate, computing the residual from the fields.
    pub fn from_witness(a: &HermitianTuple, witness: Isometry, p: usize, point: MatPoint) -> Result<Self> {
        let residual = residual(a, &witness, p, &point)?;
        Ok(Self {
            point,
            p,
            witness,
            residual,
        })
    }

    pub fn q(&self) -> usize {
        self.point.q()
    }

    /// Checks the isometry defect, the stored residual against a fresh
    /// recomputation, and `residual ≤ accept_tol`.
    pub fn revalidate(&self, a: &HermitianTuple, accept_tol: f64) -> Result<()> {
        let defect = self.witness.defect();
        if !(defect <= ISOMETRY_TOL) {
            return Err(Error::InvalidCertificate(format!("isometry defect {defect:e}")));
        }
        let r = residual(a, &self.witness, self.p, &self.point)
            .map_err(|e| Error::InvalidCertificate(e.to_string()))?;
        if !((r - self.residual).abs() <= 1e-12) {
            return Err(Error::InvalidCertificate(format!(
                "stored residual {:e} but recomputed {r:e}",
                self.residual
            )));
        }
        if !(r <= accept_tol) {
            return Err(Error::InvalidCertificate(format!(
                "residual {r:e} above tolerance {accept_tol:e}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub accept_tol: f64,
    pub max_restarts: usize,
    /// Gradient iterations per restart.
    pub max_iters: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub stagnation_window: usize,
    pub stagnation_tol: f64,
    /// Damped Gauss–Newton iterations after the gradient phase.
    pub polish_iters: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            accept_tol: 1e-8,
            max_restarts: 50,
            max_iters: 2000,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            stagnation_window: 50,
            stagnation_tol: 1e-16,
            polish_iters: 100,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.accept_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "accept_tol must be positive, got {}",
                self.accept_tol
            )));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) || !(self.initial_step > 0.0) {
            return Err(Error::InvalidArgument("step policy out of range".into()));
        }
        if self.max_restarts == 0 {
            return Err(Error::InvalidArgument("max_restarts must be positive".into()));
        }
        Ok(())
    }
}

/// Best residual over all restarts when none met the tolerance. Not a proof
/// of non-membership.
#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub best_residual: f64,
    pub restarts: usize,
    /// The best candidate found, if any restart produced one.
    pub best: Option<Box<Certificate>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<T = Certificate> {
    Accepted(T),
    Rejected(Rejection),
}

impl<T> Outcome<T> {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Outcome::Accepted(_))
    }

    pub fn accepted(&self) -> Option<&T> {
        match self {
            Outcome::Accepted(t) => Some(t),
            Outcome::Rejected(_) => None,
        }
    }

    pub fn into_accepted(self) -> Option<T> {
        match self {
            Outcome::Accepted(t) => Some(t),
            Outcome::Rejected(_) => None,
        }
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Outcome::Accepted(_) => None,
            Outcome::Rejected(r) => Some(r),
        }
    }
}

/// What the solver is asked to hit.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// Any point of the range.
    Free,
    /// A given point.
    Fixed(MatPoint),
    /// Any point `B` with `⟨normal, flatten(B)⟩ = level`.
    Hyperplane { normal: Vec<f64>, level: f64 },
}

/// `sqrt(Σ_j ‖X*A_jX − I_p⊗B_j‖_F²)`.
pub fn residual(a: &HermitianTuple, x: &Isometry, p: usize, b: &MatPoint) -> Result<f64> {
    if a.m() != b.m() {
        return Err(Error::Dimension(format!("tuple has {} members, point {}", a.m(), b.m())));
    }
    if x.k() != p * b.q() {
        return Err(Error::Dimension(format!(
            "witness has {} columns, need p*q = {}",
            x.k(),
            p * b.q()
        )));
    }
    let c = compress(a, x)?;
    Ok(c.members()
        .iter()
        .zip(b.blocks())
        .map(|(cj, bj)| cj.as_matrix().sub(&bj.as_matrix().kron_identity(p)).frobenius_norm_sqr())
        .sum::<f64>()
        .sqrt())
}

fn average_diagonal_blocks(c: &ComplexMatrix, p: usize, q: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(q, q);
    for r in 0..p {
        out = out.add(&c.submatrix(r * q, r * q, q, q));
    }
    out.scale_real(1.0 / p as f64).hermitian_part()
}

/// Least-squares optimal `B` for a fixed witness: the average of the `p`
/// diagonal `q x q` blocks of each `X*A_jX`.
pub fn best_block(a: &HermitianTuple, x: &Isometry, p: usize) -> Result<MatPoint> {
    if p == 0 || !x.k().is_multiple_of(p) {
        return Err(Error::Dimension(format!("{} columns not divisible by p = {p}", x.k())));
    }
    let q = x.k() / p;
    let c = compress(a, x)?;
    Ok(MatPoint::new_unchecked(
        q,
        c.members()
            .iter()
            .map(|cj| HermitianMatrix::new_unchecked(average_diagonal_blocks(cj.as_matrix(), p, q)))
            .collect(),
    ))
}

struct Problem<'a> {
    a: &'a HermitianTuple,
    p: usize,
    q: usize,
    target: &'a Target,
}

/// Compressions at a given `X`.
struct State {
    x: ComplexMatrix,
    ax: Vec<ComplexMatrix>,
    c: Vec<ComplexMatrix>,
    b: Vec<ComplexMatrix>,
    r: Vec<ComplexMatrix>,
    f: f64,
}

impl<'a> Problem<'a> {
    fn k(&self) -> usize {
        self.p * self.q
    }

    /// `B` as an affine function of the compressions. With `linear` set only
    /// the linear part is applied (used for Jacobian columns).
    fn blocks(&self, c: &[ComplexMatrix], linear: bool) -> Vec<ComplexMatrix> {
        let (p, q) = (self.p, self.q);
        match self.target {
            Target::Fixed(b) => {
                if linear {
                    vec![ComplexMatrix::zeros(q, q); c.len()]
                } else {
                    b.blocks().iter().map(|h| h.as_matrix().clone()).collect()
                }
            }
            Target::Free => c.iter().map(|cj| average_diagonal_blocks(cj, p, q)).collect(),
            Target::Hyperplane { normal, level } => {
                let mut v = Vec::with_capacity(normal.len());
                for cj in c {
                    flatten_block(&average_diagonal_blocks(cj, p, q), &mut v);
                }
                let uu: f64 = normal.iter().map(|x| x * x).sum();
                let uv: f64 = normal.iter().zip(&v).map(|(x, y)| x * y).sum();
                let shift = if linear { -uv / uu } else { (level - uv) / uu };
                for (vi, ui) in v.iter_mut().zip(normal) {
                    *vi += shift * ui;
                }
                v.chunks(q * q).map(|ch| unflatten_block(ch, q)).collect()
            }
        }
    }

    fn residual_blocks(&self, c: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        c.iter()
            .zip(b)
            .map(|(cj, bj)| cj.sub(&bj.kron_identity(self.p)))
            .collect()
    }

    fn state(&self, x: ComplexMatrix) -> State {
        let ax: Vec<ComplexMatrix> = self
            .a
            .members()
            .iter()
            .map(|h| h.as_matrix().matmul(&x))
            .collect();
        let c: Vec<ComplexMatrix> = ax.iter().map(|axj| x.adjoint_matmul(axj).hermitian_part()).collect();
        let b = self.blocks(&c, false);
        let r = self.residual_blocks(&c, &b);
        let f = r.iter().map(|rj| rj.frobenius_norm_sqr()).sum();
        State { x, ax, c, b, r, f }
    }

    fn retract(&self, x: &ComplexMatrix, dir: &ComplexMatrix, t: f64) -> Option<State> {
        let y = x.add(&dir.scale_real(t));
        let q = orthonormal_columns(&y).ok()?;
        let s = self.state(q);
        s.f.is_finite().then_some(s)
    }

    /// Projected gradient descent with Armijo backtracking.
    fn descend(&self, mut s: State, opts: &SolverOptions, stop: f64) -> State {
        let mut history: Vec<f64> = vec![s.f];
        let mut step = opts.initial_step;
        for _ in 0..opts.max_iters {
            if s.f.sqrt() <= stop {
                break;
            }
            let mut g = ComplexMatrix::zeros(s.x.rows(), s.x.cols());
            for (axj, rj) in s.ax.iter().zip(&s.r) {
                g.axpy(C64::new(4.0, 0.0), &axj.matmul(rj));
            }
            let xg = s.x.adjoint_matmul(&g).hermitian_part();
            let xi = g.sub(&s.x.matmul(&xg));
            let gn2 = xi.frobenius_norm_sqr();
            if gn2 == 0.0 {
                break;
            }
            let dir = xi.scale_real(-1.0);
            // Warm start at twice the last accepted step.
            let mut t = step * 2.0;
            let mut next = None;
            while t > 1e-20 {
                if let Some(cand) = self.retract(&s.x, &dir, t) {
                    if cand.f <= s.f - opts.armijo * t * gn2 {
                        next = Some(cand);
                        break;
                    }
                }
                t *= opts.shrink;
            }
            let Some(n) = next else { break };
            step = t;
            s = n;
            history.push(s.f);
            let w = opts.stagnation_window;
            if w > 0 && history.len() > w {
                let old = history[history.len() - 1 - w];
                if old - s.f < opts.stagnation_tol {
                    break;
                }
            }
        }
        s
    }

    /// Jacobian of the flattened residual blocks in tangent coordinates
    /// `X ↦ X + X_⊥K + XΩ` (`K` arbitrary, `Ω` skew-Hermitian).
    fn jacobian(&self, s: &State, xp: &ComplexMatrix) -> Vec<Vec<f64>> {
        let k = self.k();
        let nk = xp.cols();
        let y: Vec<ComplexMatrix> = s.ax.iter().map(|axj| xp.adjoint_matmul(axj)).collect();
        let mut cols = Vec::with_capacity(2 * nk * k + k * k);
        let mut push = |dc: Vec<ComplexMatrix>| {
            let db = self.blocks(&dc, true);
            let dr = self.residual_blocks(&dc, &db);
            let mut col = Vec::with_capacity(dr.len() * k * k);
            for d in &dr {
                flatten_block(d, &mut col);
            }
            cols.push(col);
        };
        for a in 0..nk {
            for b in 0..k {
                for z in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let dc = y
                        .iter()
                        .map(|yj| {
                            let mut m = ComplexMatrix::zeros(k, k);
                            for col in 0..k {
                                m[(b, col)] = z.conj() * yj[(a, col)];
                            }
                            m.add(&m.adjoint())
                        })
                        .collect();
                    push(dc);
                }
            }
        }
        for (a, b, z) in skew_basis(k) {
            let omega = skew_element(k, a, b, z);
            let dc = s
                .c
                .iter()
                .map(|cj| cj.matmul(&omega).sub(&omega.matmul(cj)))
                .collect();
            push(dc);
        }
        cols
    }

    /// Levenberg–Marquardt on the tangent parametrization.
    fn polish(&self, mut s: State, opts: &SolverOptions, stop: f64) -> State {
        let k = self.k();
        let mut mu = -1.0;
        let mut fails = 0;
        let mut it = 0;
        'outer: while it < opts.polish_iters && s.f.sqrt() > stop {
            let xp = orthogonal_complement(&s.x);
            let nk = xp.cols();
            let cols = self.jacobian(&s, &xp);
            let mut rv = Vec::with_capacity(cols.first().map_or(0, |c| c.len()));
            for r in &s.r {
                flatten_block(r, &mut rv);
            }
            let (jtj, jtr) = normal_equations(&cols, &rv);
            let dim = cols.len();
            if mu < 0.0 {
                let dmax = (0..dim).map(|i| jtj[i * dim + i]).fold(0.0, f64::max);
                mu = 1e-3 * dmax.max(1e-300);
            }
            let skew = skew_basis(k);
            loop {
                it += 1;
                let mut m = jtj.clone();
                for i in 0..dim {
                    m[i * dim + i] += mu;
                }
                let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
                let Some(delta) = cholesky_solve(&m, dim, &rhs) else {
                    mu *= 4.0;
                    fails += 1;
                    if fails > 12 || it >= opts.polish_iters {
                        break 'outer;
                    }
                    continue;
                };
                let mut kmat = ComplexMatrix::zeros(nk, k);
                let mut idx = 0;
                for a in 0..nk {
                    for b in 0..k {
                        kmat[(a, b)] = C64::new(delta[idx], delta[idx + 1]);
                        idx += 2;
                    }
                }
                let mut omega = ComplexMatrix::zeros(k, k);
                for &(a, b, z) in &skew {
                    omega.axpy(C64::new(delta[idx], 0.0), &skew_element(k, a, b, z));
                    idx += 1;
                }
                let dir = xp.matmul(&kmat).add(&s.x.matmul(&omega));
                match self.retract(&s.x, &dir, 1.0) {
                    Some(cand) if cand.f < s.f => {
                        s = cand;
                        mu = (mu / 3.0).max(1e-300);
                        fails = 0;
                        continue 'outer;
                    }
                    _ => {
                        mu *= 4.0;
                        fails += 1;
                        if fails > 12 || it >= opts.polish_iters {
                            break 'outer;
                        }
                    }
                }
            }
        }
        s
    }

    fn run(&self, x0: Isometry, opts: &SolverOptions) -> State {
        let s = self.state(x0.into_matrix());
        let stop = opts.accept_tol * 1e-3;
        // Switch to the polish once the gradient phase is in the basin.
        let switch = (1e-2 * self.a.scale()).max(stop);
        let s = self.descend(s, opts, switch);
        if s.f.sqrt() > stop && opts.polish_iters > 0 {
            let s = self.polish(s, opts, stop);
            if s.f.sqrt() > stop {
                // Gradient steps can still make progress where the damped
                // model stalls (e.g. far from any solution).
                return self.descend(s, opts, stop);
            }
            return s;
        }
        s
    }

    fn certificate(&self, s: State) -> Result<Certificate> {
        let point = MatPoint::new_unchecked(
            self.q,
            s.b.into_iter().map(|b| HermitianMatrix::new_unchecked(b.hermitian_part())).collect(),
        );
        Certificate::from_witness(self.a, Isometry::from_matrix_unchecked(s.x), self.p, point)
    }
}

/// `(a, b, kind)` for a real basis of `k x k` skew-Hermitian matrices:
/// kind 0 is `e_ab − e_ba`, kind 1 is `i(e_ab + e_ba)`, diagonal entries are
/// `i e_aa`.
fn skew_basis(k: usize) -> Vec<(usize, usize, u8)> {
    let mut out = Vec::with_capacity(k * k);
    for a in 0..k {
        out.push((a, a, 1));
        for b in a + 1..k {
            out.push((a, b, 0));
            out.push((a, b, 1));
        }
    }
    out
}

fn skew_element(k: usize, a: usize, b: usize, kind: u8) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(k, k);
    if a == b {
        m[(a, a)] = C64::new(0.0, 1.0);
    } else if kind == 0 {
        m[(a, b)] = C64::new(1.0, 0.0);
        m[(b, a)] = C64::new(-1.0, 0.0);
    } else {
        m[(a, b)] = C64::new(0.0, 1.0);
        m[(b, a)] = C64::new(0.0, 1.0);
    }
    m
}

fn check_fits(n: usize, p: usize, q: usize, context: &str) -> Result<()> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument("p and q must be positive".into()));
    }
    if p * q > n {
        return Err(Error::Structural {
            required: p * q,
            available: n,
            context: context.into(),
        });
    }
    Ok(())
}

/// Single descent from a given starting isometry. Returns the final
/// candidate, which may not meet the tolerance.
pub fn refine(a: &HermitianTuple, p: usize, target: &Target, x0: Isometry, opts: &SolverOptions) -> Result<Certificate> {
    if x0.n() != a.n() || p == 0 || !x0.k().is_multiple_of(p) {
        return Err(Error::Dimension("starting isometry does not fit the problem".into()));
    }
    let q = x0.k() / p;
    validate_target(a, q, target)?;
    let problem = Problem { a, p, q, target };
    problem.certificate(problem.run(x0, opts))
}

fn validate_target(a: &HermitianTuple, q: usize, target: &Target) -> Result<()> {
    match target {
        Target::Free => Ok(()),
        Target::Fixed(b) => {
            if b.m() != a.m() || b.q() != q {
                return Err(Error::Dimension(format!(
                    "target point is {} blocks of size {}, expected {} of size {q}",
                    b.m(),
                    b.q(),
                    a.m()
                )));
            }
            Ok(())
        }
        Target::Hyperplane { normal, level } => {
            if normal.len() != a.m() * q * q {
                return Err(Error::Dimension(format!(
                    "hyperplane normal has {} coordinates, need {}",
                    normal.len(),
                    a.m() * q * q
                )));
            }
            if normal.iter().all(|x| *x == 0.0) || !level.is_finite() {
                return Err(Error::InvalidArgument("degenerate hyperplane".into()));
            }
            Ok(())
        }
    }
}

/// Restarted search for a certificate of `target` in `Λ_{p,q}(A)`.
///
/// Restart `r` starts from a Haar isometry seeded with `seed + r`; the
/// accepted certificate is the one with the smallest qualifying restart
/// index, so the result does not depend on the number of threads.
pub fn solve(a: &HermitianTuple, p: usize, q: usize, target: &Target, opts: &SolverOptions) -> Result<Outcome> {
    opts.validate()?;
    check_fits(a.n(), p, q, "p*q exceeds the ambient dimension")?;
    validate_target(a, q, target)?;
    let problem = Problem { a, p, q, target };
    let n = a.n();
    let search = par::find_first(
        opts.max_restarts,
        |r| -> Result<Certificate> {
            let x0 = random_isometry(n, p * q, opts.seed.wrapping_add(r as u64))?;
            problem.certificate(problem.run(x0, opts))
        },
        |c| matches!(c, Ok(c) if c.residual <= opts.accept_tol),
    );
    if let Some((_, c)) = search.found {
        return Ok(Outcome::Accepted(c?));
    }
    let mut best: Option<Certificate> = None;
    let restarts = search.rejected.len();
    for (_, c) in search.rejected {
        let c = c?;
        if best.as_ref().is_none_or(|b| c.residual < b.residual) {
            best = Some(c);
        }
    }
    Ok(Outcome::Rejected(Rejection {
        best_residual: best.as_ref().map_or(f64::INFINITY, |c| c.residual),
        restarts,
        best: best.map(Box::new),
    }))
}

/// Decides (one-sidedly) whether `b ∈ Λ_{p,q}(A)`.
pub fn membership(a: &HermitianTuple, b: &MatPoint, p: usize, opts: &SolverOptions) -> Result<Outcome> {
    solve(a, p, b.q(), &Target::Fixed(b.clone()), opts)
}

/// Finds some point of `Λ_{p,q}(A)`.
pub fn solve_free(a: &HermitianTuple, p: usize, q: usize, opts: &SolverOptions) -> Result<Outcome> {
    solve(a, p, q, &Target::Free, opts)
}

/// Finds some point of the rank-k joint range `Λ_k(A)`.
pub fn find_scalar_point(a: &HermitianTuple, k: usize, opts: &SolverOptions) -> Result<Outcome<(ScalarPoint, Certificate)>> {
    Ok(match solve_free(a, k, 1, opts)? {
        Outcome::Accepted(c) => {
            let s = ScalarPoint(c.point.scalars().expect("q = 1"));
            Outcome::Accepted((s, c))
        }
        Outcome::Rejected(r) => Outcome::Rejected(r),
    })
}

const SAMPLE_STREAM: u64 = 0x5a4d;

/// Cloud of certified points of `Λ_{p,q}(A)` from independent single-start
/// free solves. Stops after `n_points` acceptances, or after
/// `n_points * max_restarts` attempts, or after `max_restarts` attempts
/// without any acceptance.
pub fn sample_range(a: &HermitianTuple, p: usize, q: usize, n_points: usize, opts: &SolverOptions) -> Result<PointCloud> {
    opts.validate()?;
    check_fits(a.n(), p, q, "p*q exceeds the ambient dimension")?;
    let single = SolverOptions {
        max_restarts: 1,
        ..opts.clone()
    };
    let cap = n_points.saturating_mul(opts.max_restarts);
    let mut certs: Vec<Certificate> = Vec::with_capacity(n_points);
    let mut attempts = 0usize;
    while certs.len() < n_points && attempts < cap {
        if attempts >= opts.max_restarts && certs.is_empty() {
            break;
        }
        let batch = (n_points - certs.len()).max(par::workers()).min(cap - attempts);
        let start = attempts;
        let results = par::map_indexed(batch, |i| {
            let o = single.clone().with_seed(derive_seed(opts.seed, SAMPLE_STREAM, (start + i) as u64));
            solve(a, p, q, &Target::Free, &o)
        });
        attempts += batch;
        for r in results {
            if let Outcome::Accepted(c) = r? {
                if certs.len() < n_points {
                    certs.push(c);
                }
            }
        }
    }
    let points = certs.iter().map(|c| c.point.clone()).collect();
    Ok(PointCloud {
        m: a.m(),
        p,
        q,
        points,
        meta: CloudMeta {
            seed: opts.seed,
            accept_tol: opts.accept_tol,
            generator: "sample_range".into(),
            attempts,
            acceptance_rate: if attempts == 0 { 0.0 } else { certs.len() as f64 / attempts as f64 },
            affine: None,
        },
        certificates: Some(certs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gue_tuple, rng};
    use crate::linalg::{direct_sum, kron_block, random_isometry};
    use crate::ranges::rank_k_interval;
    use proptest::prelude::*;

    fn quick() -> SolverOptions {
        SolverOptions {
            max_restarts: 10,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn residual_zero_on_planted_block() {
        let (p, q) = (2, 2);
        let b = gue_tuple(3, q, 4);
        let junk = gue_tuple(3, 3, 5);
        let a = direct_sum(&kron_block(p, &b).unwrap(), &junk).unwrap();
        let x = Isometry::coordinate(a.n(), p * q);
        let point = MatPoint::new(b.members().to_vec()).unwrap();
        assert!(residual(&a, &x, p, &point).unwrap() < 1e-15);
    }

    #[test]
    fn residual_identity_against_zero() {
        let a = HermitianTuple::scalar(&[1.0], 6).unwrap();
        for (p, q) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            let x = random_isometry(6, p * q, 3).unwrap();
            let r = residual(&a, &x, p, &MatPoint::scalar(&[0.0], q)).unwrap();
            assert!((r - ((p * q) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_dimension_errors() {
        let a = gue_tuple(2, 4, 0);
        let x = random_isometry(4, 3, 0).unwrap();
        assert!(residual(&a, &x, 2, &MatPoint::scalar(&[0.0, 0.0], 1)).is_err());
        assert!(residual(&a, &x, 3, &MatPoint::scalar(&[0.0], 1)).is_err());
    }

    /// Permuting the `p` column blocks of `X` permutes the diagonal blocks
    /// of `X*AX` and leaves the residual unchanged.
    #[test]
    fn residual_invariant_under_block_permutation() {
        let (p, q) = (3, 2);
        let a = gue_tuple(2, 9, 8);
        let x = random_isometry(9, p * q, 2).unwrap();
        let b = MatPoint::new(gue_tuple(2, q, 1).members().to_vec()).unwrap();
        let perm = [2usize, 0, 1];
        let idx: Vec<usize> = perm.iter().flat_map(|&r| (0..q).map(move |t| r * q + t)).collect();
        let xp = Isometry::new(x.as_matrix().select_columns(&idx)).unwrap();
        let r1 = residual(&a, &x, p, &b).unwrap();
        let r2 = residual(&a, &xp, p, &b).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn best_block_cases() {
        let b = gue_tuple(2, 2, 3);
        let a = direct_sum(&kron_block(3, &b).unwrap(), &gue_tuple(2, 2, 4)).unwrap();
        let x = Isometry::coordinate(a.n(), 6);
        let bb = best_block(&a, &x, 3).unwrap();
        for (got, want) in bb.blocks().iter().zip(b.members()) {
            assert!(got.as_matrix().sub(want.as_matrix()).frobenius_norm() < 1e-14);
        }
        let a = gue_tuple(2, 5, 1);
        let x = random_isometry(5, 3, 1).unwrap();
        let b1 = best_block(&a, &x, 1).unwrap();
        let c = compress(&a, &x).unwrap();
        for (got, want) in b1.blocks().iter().zip(c.members()) {
            assert!(got.as_matrix().sub(want.as_matrix()).frobenius_norm() < 1e-14);
        }
        assert!(best_block(&a, &x, 2).is_err());
    }

    #[test]
    fn best_block_is_optimal() {
        let a = gue_tuple(3, 7, 10);
        let x = random_isometry(7, 4, 11).unwrap();
        let b = best_block(&a, &x, 2).unwrap();
        let r0 = residual(&a, &x, 2, &b).unwrap();
        let mut r = rng(12);
        for _ in 0..100 {
            let other = MatPoint::new(
                (0..3)
                    .map(|_| crate::linalg::random::gue_matrix(2, &mut r))
                    .collect(),
            )
            .unwrap();
            let shifted = b.convex_combination(&other, 0.9).unwrap();
            assert!(r0 <= residual(&a, &x, 2, &other).unwrap() + 1e-12);
            assert!(r0 <= residual(&a, &x, 2, &shifted).unwrap() + 1e-12);
        }
    }

    #[test]
    fn scalar_tuple_membership() {
        let a = HermitianTuple::scalar(&[1.5, -2.0], 5).unwrap();
        for (p, q) in [(1, 1), (2, 2), (5, 1)] {
            let b = MatPoint::scalar(&[1.5, -2.0], q);
            let out = membership(&a, &b, p, &quick()).unwrap();
            let c = out.accepted().expect("scalar point accepted");
            assert!(c.residual <= 1e-12);
        }
    }

    #[test]
    fn interval_membership() {
        let a = HermitianTuple::diagonal(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let iv = rank_k_interval(a.member(0), 2).unwrap();
        assert!(iv.contains(2.5, 0.0) && !iv.contains(3.5, 0.0));
        let inside = membership(&a, &MatPoint::scalar(&[2.5], 1), 2, &quick()).unwrap();
        let c = inside.accepted().unwrap();
        c.revalidate(&a, 1e-8).unwrap();
        // X*AX has eigenvalues μ1 ≥ μ2 with μ2 ≤ a_2 = 3 by interlacing, so
        // ‖X*AX − 3.5 I‖_F ≥ 0.5 for every X.
        let outside = membership(&a, &MatPoint::scalar(&[3.5], 1), 2, &quick()).unwrap();
        let r = outside.rejection().unwrap();
        assert!(r.best_residual >= 0.3);
    }

    #[test]
    fn structural_infeasibility_is_an_error() {
        let a = gue_tuple(2, 3, 0);
        let e = membership(&a, &MatPoint::scalar(&[0.0, 0.0], 2), 2, &quick()).unwrap_err();
        assert!(matches!(e, Error::Structural { required: 4, available: 3, .. }));
        assert!(solve_free(&a, 4, 1, &quick()).is_err());
    }

    #[test]
    fn free_solve_scalar() {
        let a = HermitianTuple::scalar(&[0.7], 4).unwrap();
        let c = solve_free(&a, 2, 2, &quick()).unwrap().into_accepted().unwrap();
        assert!(c.point.distance(&MatPoint::scalar(&[0.7], 2)) < 1e-12);
        assert!(c.residual < 1e-12);
    }

    #[test]
    fn free_solve_guaranteed_pair() {
        // n = 9 = (k−1)(m+1)² for k = 2, m = 2.
        let a = gue_tuple(2, 9, 21);
        let c = solve_free(&a, 2, 1, &quick()).unwrap().into_accepted().unwrap();
        c.revalidate(&a, 1e-8).unwrap();
    }

    #[test]
    fn free_solve_lands_in_interval() {
        let a = HermitianTuple::diagonal(&[(1..=9).map(f64::from).collect()]).unwrap();
        let iv = rank_k_interval(a.member(0), 3).unwrap();
        assert_eq!((iv.lo, iv.hi), (3.0, 7.0));
        let c = solve_free(&a, 3, 1, &quick()).unwrap().into_accepted().unwrap();
        let b = c.point.scalars().unwrap()[0];
        assert!(iv.contains(b, 1e-6), "{b}");
    }

    #[test]
    fn scalar_point_cases() {
        let n = 4;
        let a = HermitianTuple::diagonal(&[(1..=n).map(|i| i as f64).collect()]).unwrap();
        let out = find_scalar_point(&a, n, &SolverOptions { max_restarts: 3, ..quick() }).unwrap();
        assert!(!out.is_accepted());

        let a = HermitianTuple::scalar(&[1.0, 2.0], 4).unwrap();
        let (s, _) = find_scalar_point(&a, 3, &quick()).unwrap().into_accepted().unwrap();
        assert!((s.0[0] - 1.0).abs() < 1e-12 && (s.0[1] - 2.0).abs() < 1e-12);

        let a = gue_tuple(2, 9, 5);
        let out = find_scalar_point(&a, 2, &SolverOptions::default()).unwrap();
        let (s, c) = out.into_accepted().unwrap();
        assert_eq!(s.0.len(), 2);
        assert_eq!(c.p, 2);
    }

    #[test]
    fn sample_cloud_in_interval() {
        let a = HermitianTuple::diagonal(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let cloud = sample_range(&a, 2, 1, 100, &quick()).unwrap();
        assert_eq!(cloud.len(), 100);
        assert!(cloud.meta.acceptance_rate > 0.0);
        for (pt, c) in cloud.points.iter().zip(cloud.certificates.as_ref().unwrap()) {
            let b = pt.scalars().unwrap()[0];
            assert!((2.0 - 1e-6..=3.0 + 1e-6).contains(&b), "{b}");
            c.revalidate(&a, 1e-8).unwrap();
        }
    }

    #[test]
    fn sample_cloud_scalar_tuple() {
        let a = HermitianTuple::scalar(&[2.0, -1.0], 5).unwrap();
        let cloud = sample_range(&a, 2, 2, 10, &quick()).unwrap();
        for pt in &cloud.points {
            assert!(pt.distance(&MatPoint::scalar(&[2.0, -1.0], 2)) < 1e-10);
        }
    }

    #[test]
    fn higher_rank_cloud_inside_lower_rank_support() {
        let a = gue_tuple(2, 10, 3);
        let c1 = sample_range(&a, 1, 1, 60, &quick()).unwrap();
        let c2 = sample_range(&a, 2, 1, 30, &quick()).unwrap();
        let mut r = rng(2);
        for _ in 0..16 {
            let u: Vec<f64> = crate::linalg::random::unit_vector(2, &mut r).iter().map(|z| z.re).collect();
            // Λ_2 ⊆ Λ_1 = W(A), whose support is λ_max(Σ u_j A_j).
            let h = crate::ranges::support_value(&a, &u).unwrap();
            assert!(c2.support(&u) <= h + 1e-6);
            assert!(c1.support(&u) <= h + 1e-6);
        }
    }

    #[test]
    fn hyperplane_target() {
        let a = gue_tuple(2, 8, 6);
        let target = Target::Hyperplane {
            normal: vec![1.0, 0.0],
            level: 0.0,
        };
        let c = solve(&a, 2, 1, &target, &quick()).unwrap().into_accepted().unwrap();
        assert!(c.point.scalars().unwrap()[0].abs() < 1e-9);
    }

    #[test]
    fn parallel_and_single_thread_agree() {
        let a = gue_tuple(2, 9, 17);
        let run = || solve_free(&a, 2, 1, &quick()).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        assert_eq!(one.install(run), many.install(run));
    }

    #[test]
    fn tampered_certificate_fails_revalidation() {
        let a = gue_tuple(2, 9, 21);
        let mut c = solve_free(&a, 2, 1, &quick()).unwrap().into_accepted().unwrap();
        c.revalidate(&a, 1e-8).unwrap();
        c.residual += 1e-6;
        assert!(c.revalidate(&a, 1e-8).is_err());
        c.residual -= 1e-6;
        c.point = MatPoint::scalar(&[5.0, 5.0], 1);
        assert!(c.revalidate(&a, 1e-8).is_err());
    }

    #[test]
    fn unitary_invariance_of_residual() {
        let a = gue_tuple(3, 6, 2);
        let x = random_isometry(6, 4, 3).unwrap();
        let u = random_isometry(6, 6, 4).unwrap();
        let b = best_block(&a, &x, 2).unwrap();
        let ua = compress(&a, &u).unwrap();
        // U*X as a witness for the rotated tuple.
        let ux = Isometry::new(u.as_matrix().adjoint_matmul(x.as_matrix())).unwrap();
        let r1 = residual(&a, &x, 2, &b).unwrap();
        let r2 = residual(&ua, &ux, 2, &b).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn compression_monotonicity() {
        let a = gue_tuple(2, 10, 7);
        let x0 = random_isometry(10, 6, 8).unwrap();
        let small = compress(&a, &x0).unwrap();
        let c = solve_free(&small, 2, 1, &quick()).unwrap().into_accepted().unwrap();
        let lifted = x0.compose(&c.witness).unwrap();
        let r = residual(&a, &lifted, 2, &c.point).unwrap();
        assert!((r - c.residual).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn accepted_certificates_revalidate(seed in 0u64..1000, m in 1usize..4) {
            let a = gue_tuple(m, 8, seed);
            let opts = SolverOptions { max_restarts: 4, ..SolverOptions::default() }.with_seed(seed);
            if let Outcome::Accepted(c) = solve_free(&a, 2, 1, &opts).unwrap() {
                prop_assert!(c.witness.defect() <= 1e-10);
                prop_assert!(c.revalidate(&a, 1e-8).is_ok());
            }
        }
    }
}
