//! Set partitions whose convex hulls intersect, via a small dense simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Normalized phase-1 defect above which an LP is declared infeasible.
pub const INFEASIBLE_GAP: f64 = 1e-7;
/// Largest point count for which partitions are enumerated.
pub const MAX_ENUMERATED: usize = 14;

const PIVOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealPointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl RealPointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Dimension(format!("point {i} has length {}, expected {dim}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("point {i}")));
            }
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest Euclidean norm, at least 1e-300.
    pub fn scale(&self) -> f64 {
        self.points
            .iter()
            .map(|p| norm(p))
            .fold(1e-300, f64::max)
    }

    fn subset(&self, idx: &[usize]) -> RealPointSet {
        RealPointSet {
            dim: self.dim,
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn combine(points: &[Vec<f64>], w: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (p, &l) in points.iter().zip(w) {
        for (o, x) in out.iter_mut().zip(p) {
            *o += l * x;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    /// Index sets into the original point set (for [`lp_common_point`], into
    /// the concatenation of the parts).
    pub parts: Vec<Vec<usize>>,
    pub common_point: Vec<f64>,
    /// Convex weights per part, aligned with `parts`.
    pub weights: Vec<Vec<f64>>,
    /// Partitions examined before this one was accepted (including it).
    pub scanned: usize,
}

impl PartitionResult {
    /// Largest distance between a part's weighted combination and the
    /// common point.
    pub fn reconstruction_error(&self, points: &[Vec<f64>]) -> f64 {
        let dim = self.common_point.len();
        self.parts
            .iter()
            .zip(&self.weights)
            .map(|(part, w)| {
                let pts: Vec<Vec<f64>> = part.iter().map(|&i| points[i].clone()).collect();
                let c = combine(&pts, w, dim);
                norm(&c.iter().zip(&self.common_point).map(|(a, b)| a - b).collect::<Vec<_>>())
            })
            .fold(0.0, f64::max)
    }
}

/// Result of an LP feasibility check.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Feasible(T),
    /// Normalized phase-1 objective at termination.
    Infeasible { gap: f64 },
}

impl<T> LpOutcome<T> {
    pub fn feasible(self) -> Option<T> {
        match self {
            LpOutcome::Feasible(t) => Some(t),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

/// Phase-1 simplex for `A x = b, x ≥ 0` (row-major `A`, `rows x cols`).
/// Returns the L1 defect of the final basic solution on the original
/// constraints (the phase-1 objective, recomputed) and the solution.
fn phase_one(a: &[f64], b: &[f64], rows: usize, cols: usize) -> Result<(f64, Vec<f64>)> {
    let width = cols + rows + 1;
    let mut t = vec![0.0; (rows + 1) * width];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i * width + j] = sign * a[i * cols + j];
        }
        t[i * width + cols + i] = 1.0;
        t[i * width + width - 1] = sign * b[i];
    }
    // Reduced costs of `min Σ artificials`.
    let obj = rows * width;
    for i in 0..rows {
        for j in 0..cols {
            t[obj + j] -= t[i * width + j];
        }
        t[obj + width - 1] -= t[i * width + width - 1];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let cap = 50 * (rows + cols + 10);
    let mut pivots = 0;
    loop {
        // Bland: lowest-index improving column.
        let Some(enter) = (0..cols + rows).find(|&j| t[obj + j] < -PIVOT_TOL) else {
            break;
        };
        let mut min_ratio = f64::INFINITY;
        for i in 0..rows {
            let aij = t[i * width + enter];
            if aij > PIVOT_TOL {
                min_ratio = min_ratio.min(t[i * width + width - 1].max(0.0) / aij);
            }
        }
        // Rows tied at the minimum ratio: Bland picks the smallest basic
        // index, unless its pivot is tiny next to the best tied pivot.
        let tie = 1e-12 * (1.0 + min_ratio.abs());
        let tied: Vec<usize> = (0..rows)
            .filter(|&i| {
                let aij = t[i * width + enter];
                aij > PIVOT_TOL && t[i * width + width - 1].max(0.0) / aij <= min_ratio + tie
            })
            .collect();
        let biggest = tied.iter().map(|&i| t[i * width + enter]).fold(0.0, f64::max);
        let leave = tied
            .iter()
            .copied()
            .filter(|&i| t[i * width + enter] >= 1e-6 * biggest)
            .min_by_key(|&i| basis[i])
            .map(|i| (i, min_ratio));
        let Some((row, _)) = leave else { break };
        pivots += 1;
        if pivots > cap {
            return Err(Error::IterationCap(cap));
        }
        let piv = t[row * width + enter];
        for j in 0..width {
            t[row * width + j] /= piv;
        }
        for i in 0..=rows {
            if i == row {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[row * width + j];
                }
            }
        }
        for i in 0..rows {
            let rhs = &mut t[i * width + width - 1];
            if *rhs < 0.0 {
                *rhs = 0.0;
            }
        }
        basis[row] = enter;
    }
    let mut x = vec![0.0; cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            x[bv] = t[i * width + width - 1].max(0.0);
        }
    }
    // Judge the solution on the original constraints rather than the
    // tableau, which can drift.
    let defect: f64 = (0..rows)
        .map(|i| ((0..cols).map(|j| a[i * cols + j] * x[j]).sum::<f64>() - b[i]).abs())
        .sum();
    Ok((defect, x))
}

/// Convex weights per part normalized to sum to one.
fn split_weights(x: &[f64], sizes: &[usize]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut off = 0;
    for &s in sizes {
        let w = &x[off..off + s];
        let total: f64 = w.iter().sum();
        out.push(if total > 0.0 {
            w.iter().map(|v| v / total).collect()
        } else {
            vec![1.0 / s as f64; s]
        });
        off += s;
    }
    out
}

/// Point in the intersection of the convex hulls of the parts, if any.
pub fn lp_common_point(parts: &[RealPointSet]) -> Result<LpOutcome<PartitionResult>> {
    if parts.len() < 2 {
        return Err(Error::InvalidArgument("need at least two parts".into()));
    }
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidArgument("empty part".into()));
    }
    let dim = parts[0].dim();
    if parts.iter().any(|p| p.dim() != dim) {
        return Err(Error::Dimension("parts live in different dimensions".into()));
    }
    let scale = parts.iter().map(|p| p.scale()).fold(1e-300, f64::max);
    let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    let cols: usize = sizes.iter().sum();
    let np = parts.len();
    let rows = np + dim * (np - 1);
    let mut a = vec![0.0; rows * cols];
    let b: Vec<f64> = (0..rows).map(|i| if i < np { 1.0 } else { 0.0 }).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |s, &n| {
            let o = *s;
            *s += n;
            Some(o)
        })
        .collect();
    for (l, part) in parts.iter().enumerate() {
        for (r, pt) in part.points().iter().enumerate() {
            let col = offsets[l] + r;
            a[l * cols + col] = 1.0;
            for d in 0..dim {
                let v = pt[d] / scale;
                if l == 0 {
                    for other in 1..np {
                        a[(np + (other - 1) * dim + d) * cols + col] = v;
                    }
                } else {
                    a[(np + (l - 1) * dim + d) * cols + col] = -v;
                }
            }
        }
    }
    let (gap, x) = phase_one(&a, &b, rows, cols)?;
    if gap > INFEASIBLE_GAP {
        return Ok(LpOutcome::Infeasible { gap });
    }
    let weights = split_weights(&x, &sizes);
    let common_point = combine(parts[0].points(), &weights[0], dim);
    let parts_idx = offsets
        .iter()
        .zip(&sizes)
        .map(|(&o, &s)| (o..o + s).collect())
        .collect();
    Ok(LpOutcome::Feasible(PartitionResult {
        parts: parts_idx,
        common_point,
        weights,
        scanned: 1,
    }))
}

/// Advances a restricted growth string over at most `p` blocks to its
/// lexicographic successor. Returns false when exhausted.
fn next_rgs(a: &mut [usize], p: usize) -> bool {
    let n = a.len();
    for i in (1..n).rev() {
        let prefix_max = *a[..i].iter().max().unwrap();
        if a[i] < p - 1 && a[i] <= prefix_max {
            a[i] += 1;
            for v in a[i + 1..].iter_mut() {
                *v = 0;
            }
            return true;
        }
    }
    false
}

fn blocks_of(a: &[usize], p: usize) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); p];
    for (i, &b) in a.iter().enumerate() {
        parts[b].push(i);
    }
    parts
}

/// Partitions of `0..d` into exactly `p` nonempty blocks, in lexicographic
/// order of their restricted growth strings.
pub struct Partitions {
    current: Option<Vec<usize>>,
    p: usize,
}

impl Partitions {
    pub fn new(d: usize, p: usize) -> Self {
        let current = (p >= 1 && d >= p).then(|| {
            let mut a = vec![0; d];
            for (k, v) in a[d - p + 1..].iter_mut().enumerate() {
                *v = k + 1;
            }
            a
        });
        Self { current, p }
    }
}

impl Iterator for Partitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.current.as_mut()?;
        let out = blocks_of(cur, self.p);
        loop {
            if !next_rgs(cur, self.p) {
                self.current = None;
                break;
            }
            if cur.iter().max() == Some(&(self.p - 1)) {
                break;
            }
        }
        Some(out)
    }
}

/// First partition of `S` into `p` parts (lexicographic order) whose convex
/// hulls share a point.
pub fn tverberg_partition(s: &RealPointSet, p: usize) -> Result<PartitionResult> {
    let d = s.len();
    if p == 0 || d < p {
        return Err(Error::InvalidArgument(format!("cannot split {d} points into {p} parts")));
    }
    if p == 1 {
        let w = vec![1.0 / d as f64; d];
        return Ok(PartitionResult {
            parts: vec![(0..d).collect()],
            common_point: combine(s.points(), &w, s.dim()),
            weights: vec![w],
            scanned: 1,
        });
    }
    if d > MAX_ENUMERATED {
        return Err(Error::InvalidArgument(format!(
            "partition enumeration is capped at {MAX_ENUMERATED} points, got {d}"
        )));
    }
    let mut iter = Partitions::new(d, p);
    let batch = 64 * par::workers();
    let mut scanned = 0;
    loop {
        let chunk: Vec<Vec<Vec<usize>>> = iter.by_ref().take(batch).collect();
        if chunk.is_empty() {
            return Err(Error::NoPartition { scanned });
        }
        let search = par::find_first(
            chunk.len(),
            |i| -> Result<Option<PartitionResult>> {
                let parts: Vec<RealPointSet> = chunk[i].iter().map(|b| s.subset(b)).collect();
                Ok(lp_common_point(&parts)?.feasible())
            },
            |r| !matches!(r, Ok(None)),
        );
        if let Some((i, r)) = search.found {
            let mut res = r?.expect("accepted result is feasible");
            res.parts = chunk[i].clone();
            res.scanned = scanned + i + 1;
            return Ok(res);
        }
        scanned += chunk.len();
    }
}

/// Whether `x ∈ conv(S)`: the weights on success, the phase-1 gap otherwise.
pub fn hull_membership(x: &[f64], s: &RealPointSet) -> Result<LpOutcome<Vec<f64>>> {
    if x.len() != s.dim() {
        return Err(Error::Dimension(format!("query has length {}, set dimension {}", x.len(), s.dim())));
    }
    if s.is_empty() {
        return Ok(LpOutcome::Infeasible { gap: f64::INFINITY });
    }
    let scale = s.scale().max(norm(x));
    let (dim, cols) = (s.dim(), s.len());
    let rows = dim + 1;
    let mut a = vec![0.0; rows * cols];
    let mut b = vec![0.0; rows];
    for (j, pt) in s.points().iter().enumerate() {
        for d in 0..dim {
            a[d * cols + j] = pt[d] / scale;
        }
        a[dim * cols + j] = 1.0;
    }
    for d in 0..dim {
        b[d] = x[d] / scale;
    }
    b[dim] = 1.0;
    let (gap, w) = phase_one(&a, &b, rows, cols)?;
    if gap > INFEASIBLE_GAP {
        return Ok(LpOutcome::Infeasible { gap });
    }
    Ok(LpOutcome::Feasible(split_weights(&w, &[cols]).remove(0)))
}
