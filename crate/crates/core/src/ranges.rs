//! Classical and joint numerical ranges, single-matrix rank-k ranges, tuple
//! reductions and affine images of clouds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::Certificate;
use crate::linalg::random::{rng, unit_vector};
use crate::linalg::{herm_eig, ComplexMatrix, HermitianMatrix, HermitianTuple, Isometry, C64};
use crate::par;
use crate::point::{AffineMap, CloudMeta, MatPoint, PointCloud};

/// A tuple of square complex (not necessarily Hermitian) matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTuple {
    n: usize,
    members: Vec<ComplexMatrix>,
}

impl ComplexTuple {
    pub fn new(members: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidArgument("tuple needs at least one member".into()));
        };
        let n = first.rows();
        for (j, a) in members.iter().enumerate() {
            if !a.is_square() {
                return Err(Error::Dimension(format!(
                    "member {j} is {}x{}, not square",
                    a.rows(),
                    a.cols()
                )));
            }
            if a.rows() != n {
                return Err(Error::Dimension(format!("member {j} has size {}, expected {n}", a.rows())));
            }
        }
        Ok(Self { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }
}

/// `(A_1, …, A_m) ↦ (H_1, G_1, …, H_m, G_m)` with `A_j = H_j + i G_j`.
pub fn hermitian_embed(t: &ComplexTuple) -> HermitianTuple {
    let mut out = Vec::with_capacity(2 * t.m());
    let half = C64::new(0.5, 0.0);
    let minus_half_i = C64::new(0.0, -0.5);
    for a in t.members() {
        let adj = a.adjoint();
        let h = a.add(&adj).scale(half);
        let g = a.sub(&adj).scale(minus_half_i);
        out.push(HermitianMatrix::new_unchecked(h.hermitian_part()));
        out.push(HermitianMatrix::new_unchecked(g.hermitian_part()));
    }
    HermitianTuple::new_unchecked(t.n(), out)
}

fn determinant(t: &[Vec<f64>]) -> f64 {
    let n = t.len();
    let mut a: Vec<Vec<f64>> = t.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// `B_j = Σ_i t_ij A_i` for a nonsingular real `m x m` matrix `T`.
pub fn tuple_linear_transform(a: &HermitianTuple, t: &[Vec<f64>]) -> Result<HermitianTuple> {
    let m = a.m();
    if t.len() != m || t.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension(format!("transform must be {m}x{m}")));
    }
    let det = determinant(t);
    let scale: f64 = t
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
        .product();
    if det.abs() <= 1e-12 * scale.max(1e-300) {
        return Err(Error::Singular { det });
    }
    let members = (0..m)
        .map(|j| {
            let w: Vec<f64> = (0..m).map(|i| t[i][j]).collect();
            a.combination(&w)
        })
        .collect();
    Ok(HermitianTuple::new_unchecked(a.n(), members))
}

/// Shape classification of a computed numerical range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Point,
    Segment,
    Region,
}

/// Inner polygon (boundary points of `W(A)`) plus the supporting half-planes
/// `Re(e^{-iθ} z) ≤ support[i]` at the same angles.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundary2D {
    pub angles: Vec<f64>,
    pub vertices: Vec<C64>,
    pub support: Vec<f64>,
    /// Unit vectors `x` with `⟨Ax, x⟩ = vertices[i]`.
    pub witnesses: Vec<Vec<C64>>,
    pub shape: Shape,
}

impl Boundary2D {
    /// Membership in the outer polygon inflated by `tol`.
    pub fn outer_contains(&self, z: C64, tol: f64) -> bool {
        self.angles
            .iter()
            .zip(&self.support)
            .all(|(&th, &h)| z.re * th.cos() + z.im * th.sin() <= h + tol)
    }

    /// Vertices of the outer polygon: intersections of consecutive
    /// supporting lines.
    pub fn outer_vertices(&self) -> Vec<C64> {
        let k = self.angles.len();
        (0..k)
            .filter_map(|i| {
                let j = (i + 1) % k;
                let (c1, s1) = (self.angles[i].cos(), self.angles[i].sin());
                let (c2, s2) = (self.angles[j].cos(), self.angles[j].sin());
                let det = c1 * s2 - s1 * c2;
                if det.abs() < 1e-15 {
                    return None;
                }
                let (h1, h2) = (self.support[i], self.support[j]);
                Some(C64::new((h1 * s2 - h2 * s1) / det, (c1 * h2 - c2 * h1) / det))
            })
            .collect()
    }

    /// Hausdorff distance between the outer and inner polygons.
    pub fn hausdorff_gap(&self) -> f64 {
        let hull = convex_hull(&self.vertices);
        self.outer_vertices()
            .into_iter()
            .map(|z| distance_to_polygon(z, &hull))
            .fold(0.0, f64::max)
    }
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counter-clockwise convex hull (Andrew's monotone chain).
pub(crate) fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts: Vec<C64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-15);
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<C64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<C64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(hull: &[C64]) -> f64 {
    let k = hull.len();
    if k < 3 {
        return 0.0;
    }
    0.5 * (0..k)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % k]);
            a.re * b.im - a.im * b.re
        })
        .sum::<f64>()
        .abs()
}

fn distance_to_segment(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn distance_to_polygon(z: C64, hull: &[C64]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (z - hull[0]).norm(),
        2 => distance_to_segment(z, hull[0], hull[1]),
        k => {
            let inside = (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], z) >= 0.0);
            if inside {
                0.0
            } else {
                (0..k)
                    .map(|i| distance_to_segment(z, hull[i], hull[(i + 1) % k]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Supporting-line computation of `W(A)`: for each angle the top
/// eigenvector of `Re(e^{-iθ}A)` gives a boundary point and the top
/// eigenvalue the support value.
pub fn numrange_boundary(a: &ComplexMatrix, n_angles: usize) -> Result<Boundary2D> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "numerical range of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if n_angles < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 angles, got {n_angles}")));
    }
    let adj = a.adjoint();
    let angles: Vec<f64> = (0..n_angles).map(|i| 2.0 * PI * i as f64 / n_angles as f64).collect();
    let per_angle = par::map_indexed(n_angles, |i| -> Result<(C64, f64, Vec<C64>)> {
        let th = angles[i];
        let e = C64::new(th.cos(), -th.sin());
        let h = a.scale(e * 0.5).add(&adj.scale(e.conj() * 0.5));
        let eig = herm_eig(&HermitianMatrix::new_unchecked(h.hermitian_part()))?;
        let x = eig.vectors.column(0);
        let xm = ComplexMatrix::from_row_major(x.len(), 1, x.clone())?;
        let v = xm.adjoint_matmul(&a.matmul(&xm))[(0, 0)];
        Ok((v, eig.values[0], x))
    });
    let mut vertices = Vec::with_capacity(n_angles);
    let mut support = Vec::with_capacity(n_angles);
    let mut witnesses = Vec::with_capacity(n_angles);
    for r in per_angle {
        let (v, h, x) = r?;
        vertices.push(v);
        support.push(h);
        witnesses.push(x);
    }
    let hull = convex_hull(&vertices);
    let diam = hull
        .iter()
        .flat_map(|a| hull.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let scale = a.frobenius_norm().max(1.0);
    let shape = if diam <= 1e-12 * scale {
        Shape::Point
    } else if polygon_area(&hull) < 1e-12 * diam * diam {
        Shape::Segment
    } else {
        Shape::Region
    };
    Ok(Boundary2D {
        angles,
        vertices,
        support,
        witnesses,
        shape,
    })
}

/// Haar-uniform unit vectors `x` mapped to `(⟨A_j x, x⟩)_j`; each point
/// carries its `p = 1` certificate.
pub fn joint_numrange_sample(a: &HermitianTuple, count: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let n = a.n();
    // One sequential stream keeps the sample identical across thread counts.
    let mut r = rng(seed);
    let vectors: Vec<Vec<C64>> = (0..count).map(|_| unit_vector(n, &mut r)).collect();
    let results = par::map_indexed(count, |i| -> Result<(MatPoint, Certificate)> {
        let x = ComplexMatrix::from_row_major(n, 1, vectors[i].clone())?;
        let values: Vec<f64> = a
            .members()
            .iter()
            .map(|h| x.adjoint_matmul(&h.as_matrix().matmul(&x))[(0, 0)].re)
            .collect();
        let point = MatPoint::scalar(&values, 1);
        let cert = Certificate::from_witness(a, Isometry::from_matrix_unchecked(x), 1, point.clone())?;
        Ok((point, cert))
    });
    let mut points = Vec::with_capacity(count);
    let mut certs = Vec::with_capacity(count);
    for r in results {
        let (p, c) = r?;
        points.push(p);
        certs.push(c);
    }
    Ok(PointCloud {
        m: a.m(),
        p: 1,
        q: 1,
        points,
        certificates: Some(certs),
        meta: CloudMeta {
            seed,
            accept_tol: 0.0,
            generator: "joint_numrange_sample".into(),
            attempts: count,
            acceptance_rate: 1.0,
            affine: None,
        },
    })
}

/// `max_{b ∈ W(A)} ⟨u, b⟩ = λ_max(Σ u_j A_j)`.
pub fn support_value(a: &HermitianTuple, u: &[f64]) -> Result<f64> {
    if u.len() != a.m() {
        return Err(Error::Dimension(format!("direction of length {} for m={}", u.len(), a.m())));
    }
    if u.iter().map(|x| x * x).sum::<f64>() == 0.0 {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    Ok(herm_eig(&a.combination(u))?.values[0])
}

/// Closed interval, flagged empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl Interval {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        !self.empty && x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        other.empty || (!self.empty && other.lo >= self.lo - tol && other.hi <= self.hi + tol)
    }
}

/// `Λ_k(A) = [a_{n−k+1}, a_k]` for a single Hermitian matrix with
/// eigenvalues `a_1 ≥ … ≥ a_n`.
pub fn rank_k_interval(a: &HermitianMatrix, k: usize) -> Result<Interval> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let ev = herm_eig(a)?.values;
    let hi = ev[k - 1];
    let lo = ev[n - k];
    Ok(Interval { lo, hi, empty: hi < lo })
}

/// Pointwise image of a cloud under a real affine map on flattened
/// coordinates; the result is a cloud of scalar (`q = 1`) points.
pub fn affine_image(cloud: &PointCloud, l: &AffineMap) -> Result<PointCloud> {
    let d = cloud.m * cloud.q * cloud.q;
    if l.input_dim() != d || l.offset.len() != l.output_dim() {
        return Err(Error::Dimension(format!(
            "affine map takes {} coordinates, cloud points have {d}",
            l.input_dim()
        )));
    }
    let points = cloud
        .points
        .iter()
        .map(|b| MatPoint::scalar(&l.apply(&b.flatten()), 1))
        .collect();
    let mut meta = cloud.meta.clone();
    meta.affine = Some(l.clone());
    Ok(PointCloud {
        m: l.output_dim(),
        p: cloud.p,
        q: 1,
        points,
        certificates: None,
        meta,
    })
}
