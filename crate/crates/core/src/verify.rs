//! Pass/fail suites over random ensembles.
//!
//! Each suite runs its trials in parallel, merges them in trial order and
//! records the seed of every failing trial so it can be replayed alone.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    corner_compress, corner_recertify, nonempty_bound, refined_nonempty_bound, star_center_scalar, star_segment,
    CornerSpec, StarCenter,
};
use crate::error::{Error, Result};
use crate::feasibility::{find_scalar_point, membership, sample_range, solve_free, Certificate, Outcome, SolverOptions};
use crate::linalg::random::{derive_seed, ginibre, gue_matrix, gue_tuple, isometry_from_rng, rng, unit_vector};
use crate::linalg::{
    direct_sum, kron_block, orthogonal_complement, ComplexMatrix, HermitianMatrix, HermitianTuple, Isometry, C64,
};
use crate::par;
use crate::point::{MatPoint, PointCloud};
use crate::ranges::{hermitian_embed, joint_numrange_sample, numrange_boundary, rank_k_interval, ComplexTuple};

/// Default pass-rate threshold for stochastic suites.
pub const DEFAULT_THRESHOLD: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub seed: u64,
    pub diagnostic: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub passes: usize,
    pub failures: Vec<TrialFailure>,
    /// Required pass rate.
    pub threshold: f64,
    /// A passing trial means a non-membership was certified.
    pub expected_failure: bool,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl SuiteReport {
    fn new(suite: &str, threshold: f64, accept_tol: f64) -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("accept_tol".to_string(), accept_tol);
        Self {
            suite: suite.to_string(),
            trials: 0,
            passes: 0,
            failures: Vec::new(),
            threshold,
            expected_failure: false,
            tolerances,
            notes: Vec::new(),
            wall_time: None,
        }
    }

    fn record(&mut self, seed: u64, outcome: std::result::Result<(), String>) {
        self.trials += 1;
        match outcome {
            Ok(()) => self.passes += 1,
            Err(diagnostic) => self.failures.push(TrialFailure { seed, diagnostic }),
        }
    }

    fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    /// Pass fraction; an empty suite passes vacuously.
    pub fn pass_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.passes as f64 / self.trials as f64
        }
    }

    pub fn meets_threshold(&self) -> bool {
        self.pass_rate() >= self.threshold
    }

    pub fn is_consistent(&self) -> bool {
        self.passes + self.failures.len() == self.trials
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub threshold: f64,
    pub solver: SolverOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
            solver: SolverOptions::default(),
        }
    }
}

impl SuiteConfig {
    fn trial_seed(&self, stream: u64, trial: usize) -> u64 {
        derive_seed(self.seed, stream, trial as u64)
    }

    fn report(&self, suite: &str) -> SuiteReport {
        SuiteReport::new(suite, self.threshold, self.solver.accept_tol)
    }
}

type TrialResult = (u64, std::result::Result<(), String>);

fn merge(report: &mut SuiteReport, results: Vec<TrialResult>) {
    for (seed, r) in results {
        report.record(seed, r);
    }
}

fn diag(e: Error) -> String {
    e.to_string()
}

const STAR_STREAM: u64 = 0x57a2;
const BOUNDS_STREAM: u64 = 0xb0d5;
const CORNER_STREAM: u64 = 0xc02e;
const CONVEX_STREAM: u64 = 0xc0e7;
const PERTURB_STREAM: u64 = 0x9e27;

/// Segment from `b` to the center at parameter `t`: the constructive witness
/// first, then the membership solver.
fn segment_trial(
    a: &HermitianTuple,
    b: &Certificate,
    center: &StarCenter,
    t: f64,
    opts: &SolverOptions,
) -> std::result::Result<(), String> {
    match star_segment(a, b, center, t).and_then(|c| c.revalidate(a, opts.accept_tol)) {
        Ok(()) => Ok(()),
        Err(first) => {
            let target = b.point.convex_combination(&center.point, t).map_err(diag)?;
            match membership(a, &target, b.p, opts).map_err(diag)? {
                Outcome::Accepted(_) => Ok(()),
                Outcome::Rejected(r) => Err(format!(
                    "t = {t}: construction failed ({first}); solver best residual {:.3e}",
                    r.best_residual
                )),
            }
        }
    }
}

fn star_trials(
    a: &HermitianTuple,
    points: &[Certificate],
    center: &StarCenter,
    t_grid: &[f64],
    cfg: &SuiteConfig,
    report: &mut SuiteReport,
) {
    let per = t_grid.len();
    let results = par::map_indexed(points.len() * per, |i| {
        let seed = cfg.trial_seed(STAR_STREAM, i);
        let opts = cfg.solver.clone().with_seed(seed);
        (seed, segment_trial(a, &points[i / per], center, t_grid[i % per], &opts))
    });
    merge(report, results);
}

/// Segments from sampled points of `Λ_{p,q}(A)` to a scalar center built at
/// level `pq(m+2)`.
pub fn check_star_shaped(
    a: &HermitianTuple,
    p: usize,
    q: usize,
    n_points: usize,
    t_grid: &[f64],
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    let center = match star_center_scalar(a, p, q, &cfg.solver)? {
        Outcome::Accepted(c) => c,
        Outcome::Rejected(r) => {
            return Err(Error::StageFailed {
                stage: 0,
                best_residual: r.best_residual,
            })
        }
    };
    let sample_opts = cfg.solver.clone().with_seed(derive_seed(cfg.seed, STAR_STREAM, u64::MAX));
    let cloud = sample_range(a, p, q, n_points, &sample_opts)?;
    let mut report = cfg.report("star");
    if center.below_bound {
        report.notes.push(format!(
            "n = {} is below the sufficiency bound for level {}",
            a.n(),
            center.level
        ));
    }
    if cloud.len() < n_points {
        for i in cloud.len()..n_points {
            for _ in t_grid {
                report.record(derive_seed(cfg.seed, STAR_STREAM, i as u64), Err("no sample point found".into()));
            }
        }
    }
    let certs = cloud.certificates.unwrap_or_default();
    star_trials(a, &certs, &center, t_grid, cfg, &mut report);
    Ok(report)
}

/// Planted instance `c·I_K ⊕ (I_p ⊗ B_1) ⊕ … ⊕ (I_p ⊗ B_s)` with exact
/// coordinate witnesses for every point and for the center.
pub fn planted_star_instance(
    m: usize,
    p: usize,
    q: usize,
    n_points: usize,
    seed: u64,
) -> Result<(HermitianTuple, Vec<Certificate>, StarCenter)> {
    let k = p * q * (m + 2);
    let mut r = rng(seed);
    let c: Vec<f64> = (0..m).map(|_| r.random_range(-1.0..1.0)).collect();
    let mut a = HermitianTuple::scalar(&c, k)?;
    let mut blocks = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let b = gue_tuple(m, q, derive_seed(seed, 1, i as u64));
        a = direct_sum(&a, &kron_block(p, &b)?)?;
        blocks.push(b);
    }
    let n = a.n();
    let center_cert = Certificate::from_witness(
        &a,
        Isometry::coordinates(n, &(0..k).collect::<Vec<_>>()),
        k,
        MatPoint::scalar(&c, 1),
    )?;
    let center = StarCenter {
        point: MatPoint::scalar(&c, q),
        level: k,
        certificate: center_cert,
        below_bound: false,
        p,
        q,
    };
    let mut certs = Vec::with_capacity(n_points);
    for (i, b) in blocks.iter().enumerate() {
        let start = k + i * p * q;
        let x = Isometry::coordinates(n, &(start..start + p * q).collect::<Vec<_>>());
        certs.push(Certificate::from_witness(&a, x, p, MatPoint::new(b.members().to_vec())?)?);
    }
    Ok((a, certs, center))
}

/// Star suite on a planted instance; every trial should pass exactly.
pub fn check_star_shaped_planted(
    m: usize,
    p: usize,
    q: usize,
    n_points: usize,
    t_grid: &[f64],
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    let (a, certs, center) = planted_star_instance(m, p, q, n_points, cfg.seed)?;
    let mut report = cfg.report("star-planted");
    star_trials(&a, &certs, &center, t_grid, cfg, &mut report);
    Ok(report)
}

/// Non-emptiness of `Λ_k` for GUE tuples at the sufficiency dimension
/// (`(k−1)(m+1)²`, or `(m+1)k − m` when `refined`). For `m = 1` every
/// success is also checked against the eigenvalue interval.
pub fn check_nonempty_bounds(m: usize, k: usize, trials: usize, refined: bool, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut report = cfg.report("bounds").tolerance("interval_tol", 1e-6);
    if m == 0 {
        report.notes.push("empty tuple: vacuous pass".into());
        return Ok(report);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if refined && m > 2 {
        return Err(Error::InvalidArgument("the refined bound holds for m <= 2".into()));
    }
    let n = if refined { refined_nonempty_bound(m, k) } else { nonempty_bound(m, k) }.max(k);
    report.tolerances.insert("n".into(), n as f64);
    let results = par::map_indexed(trials, |i| {
        let seed = cfg.trial_seed(BOUNDS_STREAM, i);
        let a = gue_tuple(m, n, seed);
        let outcome = (|| -> std::result::Result<(), String> {
            let found = find_scalar_point(&a, k, &cfg.solver.clone().with_seed(seed)).map_err(diag)?;
            let (s, cert) = match found {
                Outcome::Accepted(v) => v,
                Outcome::Rejected(r) => return Err(format!("no point found, best residual {:.3e}", r.best_residual)),
            };
            cert.revalidate(&a, cfg.solver.accept_tol).map_err(diag)?;
            if m == 1 {
                let iv = rank_k_interval(a.member(0), k).map_err(diag)?;
                if iv.empty {
                    return Err("eigenvalue interval is empty".into());
                }
                if !iv.contains(s.0[0], 1e-6) {
                    return Err(format!("{} outside [{}, {}]", s.0[0], iv.lo, iv.hi));
                }
            }
            Ok(())
        })();
        (seed, outcome)
    });
    merge(&mut report, results);
    Ok(report)
}

/// Points of `Λ_{p,q}(A)` re-certified in `Λ_{p−qr,q}` of random corners of
/// co-dimension `r`.
pub fn check_corner_inclusions(
    a: &HermitianTuple,
    p: usize,
    q: usize,
    r: usize,
    n_points: usize,
    corners: usize,
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    if r > 0 && !(q * r < p && p * q <= a.n()) {
        return Err(Error::InvalidArgument(format!(
            "corner inclusion needs 1 <= qr < p with pq <= n (p={p}, q={q}, r={r}, n={})",
            a.n()
        )));
    }
    let p_out = if r == 0 { p } else { p - q * r };
    let sample_opts = cfg.solver.clone().with_seed(derive_seed(cfg.seed, CORNER_STREAM, u64::MAX));
    let cloud = sample_range(a, p, q, n_points, &sample_opts)?;
    let certs = cloud.certificates.unwrap_or_default();
    let mut report = cfg.report("inclusions");
    report.notes.push(format!("{corners} random corners per point; the statement covers all corners"));
    for i in certs.len()..n_points {
        report.record(cfg.trial_seed(CORNER_STREAM, i * corners), Err("no sample point found".into()));
    }
    let results = par::map_indexed(certs.len() * corners, |i| {
        let seed = cfg.trial_seed(CORNER_STREAM, i);
        let outcome = (|| -> std::result::Result<(), String> {
            let spec = CornerSpec::random(a.n(), r, seed).map_err(diag)?;
            let c = corner_recertify(a, &certs[i / corners], &spec, p_out).map_err(diag)?;
            let corner = corner_compress(a, &spec).map_err(diag)?;
            c.revalidate(&corner, cfg.solver.accept_tol).map_err(diag)
        })();
        (seed, outcome)
    });
    merge(&mut report, results);
    Ok(report)
}

/// `Λ_k(A) ⊆ Λ_{k−r}` of random principal submatrices of size `n − r`,
/// checked on eigenvalue intervals and on certified points.
pub fn check_corner_interlacing(n: usize, k: usize, r: usize, trials: usize, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if !(r < k && k <= n) {
        return Err(Error::InvalidArgument(format!("need r < k <= n (n={n}, k={k}, r={r})")));
    }
    let mut report = cfg.report("inclusions-interlacing").tolerance("interval_tol", 1e-9);
    let results = par::map_indexed(trials, |i| {
        let seed = cfg.trial_seed(CORNER_STREAM ^ 1, i);
        let outcome = (|| -> std::result::Result<(), String> {
            let mut g = rng(seed);
            let h = gue_matrix(n, &mut g);
            let mut idx: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), &mut g);
            let spec = CornerSpec::coordinate_complement(n, &idx[..r]);
            let a = HermitianTuple::new(vec![h]).map_err(diag)?;
            let sub = corner_compress(&a, &spec).map_err(diag)?;
            let big = rank_k_interval(a.member(0), k).map_err(diag)?;
            let small = rank_k_interval(sub.member(0), k - r).map_err(diag)?;
            if !small.contains_interval(&big, 1e-9) {
                return Err(format!("[{}, {}] not inside [{}, {}]", big.lo, big.hi, small.lo, small.hi));
            }
            if let Outcome::Accepted((s, cert)) =
                find_scalar_point(&a, k, &cfg.solver.clone().with_seed(seed)).map_err(diag)?
            {
                let c = corner_recertify(&a, &cert, &spec, k - r).map_err(diag)?;
                c.revalidate(&sub, cfg.solver.accept_tol).map_err(diag)?;
                if !small.contains(s.0[0], 1e-6) {
                    return Err(format!("certified {} outside the corner interval", s.0[0]));
                }
            }
            Ok(())
        })();
        (seed, outcome)
    });
    merge(&mut report, results);
    Ok(report)
}

/// What a midpoint trial is expected to show.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Expectation {
    Member,
    /// Rejection with best residual at least this large.
    NonMember { min_residual: f64 },
}

/// Midpoints of random pairs of cloud points checked for membership.
pub fn check_convexity(
    cloud: &PointCloud,
    a: &HermitianTuple,
    p: usize,
    pairs: usize,
    expect: Expectation,
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    if cloud.certificates.is_none() && !cloud.is_empty() {
        return Err(Error::InvalidArgument("convexity suite needs certified points".into()));
    }
    let mut report = cfg.report("convexity");
    if let Expectation::NonMember { min_residual } = expect {
        report.expected_failure = true;
        report = report.tolerance("min_residual", min_residual);
    }
    if cloud.len() < 2 {
        report.notes.push("fewer than two points: vacuous pass".into());
        return Ok(report);
    }
    let results = par::map_indexed(pairs, |i| {
        let seed = cfg.trial_seed(CONVEX_STREAM, i);
        let mut g = rng(seed);
        let s = g.random_range(0..cloud.len());
        let t = (s + 1 + g.random_range(0..cloud.len() - 1)) % cloud.len();
        (seed, midpoint_trial(a, &cloud.points[s], &cloud.points[t], p, expect, &cfg.solver.clone().with_seed(seed)))
    });
    merge(&mut report, results);
    Ok(report)
}

fn midpoint_trial(
    a: &HermitianTuple,
    x: &MatPoint,
    y: &MatPoint,
    p: usize,
    expect: Expectation,
    opts: &SolverOptions,
) -> std::result::Result<(), String> {
    let mid = x.convex_combination(y, 0.5).map_err(diag)?;
    let out = membership(a, &mid, p, opts).map_err(diag)?;
    match (expect, out) {
        (Expectation::Member, Outcome::Accepted(_)) => Ok(()),
        (Expectation::Member, Outcome::Rejected(r)) => {
            Err(format!("midpoint rejected, best residual {:.3e}", r.best_residual))
        }
        (Expectation::NonMember { .. }, Outcome::Accepted(c)) => {
            Err(format!("midpoint accepted at residual {:.3e}", c.residual))
        }
        (Expectation::NonMember { min_residual }, Outcome::Rejected(r)) => {
            if r.best_residual >= min_residual {
                Ok(())
            } else {
                Err(format!("best residual {:.3e} below {min_residual}", r.best_residual))
            }
        }
    }
}

/// Outcome of the Pauli nonconvexity demonstration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliDemo {
    pub report: SuiteReport,
    pub samples: usize,
    /// Largest `| ‖s‖ − 1 |` over the samples.
    pub sphere_defect: f64,
}

/// Joint range of the Pauli triple: samples lie on the unit sphere and the
/// midpoint of antipodal samples (the origin) is not in the range.
pub fn check_pauli_nonconvexity(samples: usize, pairs: usize, restarts: usize, cfg: &SuiteConfig) -> Result<PauliDemo> {
    let a = HermitianTuple::pauli();
    let cloud = joint_numrange_sample(&a, samples, cfg.seed)?;
    let sphere_defect = cloud
        .points
        .iter()
        .map(|pt| (pt.flatten().iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    let min_residual = 0.5;
    let mut report = cfg
        .report("convexity-pauli")
        .tolerance("min_residual", min_residual)
        .tolerance("sphere_tol", 1e-10);
    report.expected_failure = true;
    let opts = SolverOptions {
        max_restarts: restarts,
        ..cfg.solver.clone()
    };
    let results = par::map_indexed(pairs, |i| {
        let seed = cfg.trial_seed(CONVEX_STREAM ^ 2, i);
        let mut g = rng(seed);
        let x = unit_vector(2, &mut g);
        // The orthogonal unit vector maps to the antipode on the sphere.
        let y = vec![-x[1].conj(), x[0].conj()];
        let point = |v: &[C64]| -> MatPoint {
            let vals: Vec<f64> = a
                .members()
                .iter()
                .map(|h| {
                    let m = h.as_matrix();
                    let mut s = C64::new(0.0, 0.0);
                    for r in 0..2 {
                        for c in 0..2 {
                            s += v[r].conj() * m[(r, c)] * v[c];
                        }
                    }
                    s.re
                })
                .collect();
            MatPoint::scalar(&vals, 1)
        };
        let expect = Expectation::NonMember { min_residual };
        (seed, midpoint_trial(&a, &point(&x), &point(&y), 1, expect, &opts.clone().with_seed(seed)))
    });
    merge(&mut report, results);
    if sphere_defect > 1e-10 {
        report.notes.push(format!("sample off the sphere by {sphere_defect:.3e}"));
    }
    Ok(PauliDemo {
        report,
        samples: cloud.len(),
        sphere_defect,
    })
}

/// Midpoints of sampled points of `W(T)` for random complex `n x n` matrices
/// against the outer boundary polygon inflated by `tol`.
pub fn check_numrange_convexity(
    matrices: usize,
    n: usize,
    pairs: usize,
    n_angles: usize,
    tol: f64,
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    let mut report = cfg.report("convexity-numrange").tolerance("inflation", tol);
    let per = par::map_indexed(matrices, |i| -> Result<Vec<TrialResult>> {
        let seed = cfg.trial_seed(CONVEX_STREAM ^ 3, i);
        let t = ginibre(n, seed);
        let boundary = numrange_boundary(&t, n_angles)?;
        let e = hermitian_embed(&ComplexTuple::new(vec![t])?);
        let cloud = joint_numrange_sample(&e, 2 * pairs, seed)?;
        Ok((0..pairs)
            .map(|j| {
                let (x, y) = (cloud.points[2 * j].flatten(), cloud.points[2 * j + 1].flatten());
                let z = C64::new(0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]));
                let r = if boundary.outer_contains(z, tol) {
                    Ok(())
                } else {
                    Err(format!("midpoint {z} outside the boundary polygon"))
                };
                (derive_seed(seed, 0, j as u64), r)
            })
            .collect())
    });
    for r in per {
        merge(&mut report, r?);
    }
    Ok(report)
}

/// How the perturbation suite builds `F` and the corner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PerturbationMode {
    /// Random Hermitian `F_j` supported on a random subspace of this rank;
    /// rank 0 gives `F = 0`.
    Random { rank: usize },
    /// Diagonal `A`, `F_j` supported on the first coordinate.
    PlantedDiagonal,
}

/// Points certified in the corner annihilating `F` re-certify in
/// `Λ_{p,q}(A + F)`.
pub fn check_perturbation_equivalence(
    a: &HermitianTuple,
    p: usize,
    q: usize,
    trials: usize,
    mode: PerturbationMode,
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    let n = a.n();
    let rank = match mode {
        PerturbationMode::Random { rank } => rank,
        PerturbationMode::PlantedDiagonal => 1,
    };
    if rank + p * q > n {
        return Err(Error::Structural {
            required: rank + p * q,
            available: n,
            context: "corner annihilating the perturbation".into(),
        });
    }
    let mut report = cfg.report("perturbation");
    let results = par::map_indexed(trials, |i| {
        let seed = cfg.trial_seed(PERTURB_STREAM, i);
        let outcome = (|| -> std::result::Result<(), String> {
            let mut g = rng(seed);
            let (v, y) = match mode {
                PerturbationMode::PlantedDiagonal => (
                    Isometry::coordinate(n, 0).into_matrix(),
                    Isometry::coordinates(n, &(1..n).collect::<Vec<_>>()),
                ),
                PerturbationMode::Random { rank } => {
                    let v = if rank == 0 {
                        ComplexMatrix::zeros(n, 0)
                    } else {
                        isometry_from_rng(n, rank, &mut g).map_err(diag)?.into_matrix()
                    };
                    let y = Isometry::new(orthogonal_complement(&v)).map_err(diag)?;
                    (v, y)
                }
            };
            let f: Vec<HermitianMatrix> = (0..a.m())
                .map(|_| {
                    let small = gue_matrix(v.cols(), &mut g);
                    let full = v.matmul(small.as_matrix()).matmul(&v.adjoint()).scale_real(3.0);
                    HermitianMatrix::new(full.hermitian_part()).expect("hermitian part")
                })
                .collect();
            let perturbed = a.add(&HermitianTuple::new(f).map_err(diag)?).map_err(diag)?;
            let corner = crate::linalg::compress(a, &y).map_err(diag)?;
            let cert = match solve_free(&corner, p, q, &cfg.solver.clone().with_seed(seed)).map_err(diag)? {
                Outcome::Accepted(c) => c,
                Outcome::Rejected(r) => {
                    return Err(format!("no corner point found, best residual {:.3e}", r.best_residual))
                }
            };
            let x = y.as_matrix().matmul(cert.witness.as_matrix());
            let lifted = Certificate::from_witness(&perturbed, Isometry::new(x).map_err(diag)?, p, cert.point.clone())
                .map_err(diag)?;
            lifted.revalidate(&perturbed, cfg.solver.accept_tol).map_err(diag)
        })();
        (seed, outcome)
    });
    merge(&mut report, results);
    Ok(report)
}
