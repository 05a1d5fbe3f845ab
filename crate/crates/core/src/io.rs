//! JSON file formats.
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.
//! Serialization is canonical: compact, fixed key order, shortest round-trip
//! decimals and a single trailing newline, so `save(load(f)) == f` for any
//! file written here.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constructions::{EssentialEstimate, TverbergLift};
use crate::error::{Error, Result};
use crate::feasibility::Certificate;
use crate::linalg::{ComplexMatrix, HermitianMatrix, HermitianTuple, Isometry, C64, HERMITIAN_TOL};
use crate::point::{CloudMeta, MatPoint, PointCloud, FLATTENING_TAG};
use crate::ranges::{hermitian_embed, Boundary2D, ComplexTuple, Shape};

pub const SCHEMA_VERSION: &str = "1";

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

pub fn encode_matrix(m: &ComplexMatrix) -> MatrixRows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn decode_matrix(rows: &MatrixRows, what: &str) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|row| row.len() != c) {
        return Err(Error::Schema(format!("{what}: row {i} has {} entries, expected {c}", rows[i].len())));
    }
    let m = ComplexMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
    if !m.is_finite() {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(m)
}

/// Compact JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value).map_err(|e| Error::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len();
    }
    text.len()
}

/// Parses JSON, mapping syntax errors to byte offsets and shape errors to
/// [`Error::Schema`].
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => Error::Schema(e.to_string()),
            Category::Eof => Error::Parse {
                offset: text.len(),
                message: e.to_string(),
            },
            _ => Error::Parse {
                offset: byte_offset(text, e.line(), e.column()),
                message: e.to_string(),
            },
        }
    })
}

fn check_version(v: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Schema(format!("schema_version {v:?}, expected {SCHEMA_VERSION:?}")));
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleFile {
    pub schema_version: String,
    pub m: usize,
    pub n: usize,
    pub hermitian: bool,
    pub matrices: Vec<MatrixRows>,
}

/// A loaded tuple: Hermitian, or complex when the file is not flagged
/// Hermitian and embedding was not requested.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedTuple {
    Hermitian(HermitianTuple),
    Complex(ComplexTuple),
}

impl TupleFile {
    pub fn from_hermitian(a: &HermitianTuple) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            m: a.m(),
            n: a.n(),
            hermitian: true,
            matrices: a.members().iter().map(|h| encode_matrix(h.as_matrix())).collect(),
        }
    }

    pub fn from_complex(t: &ComplexTuple) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            m: t.m(),
            n: t.n(),
            hermitian: false,
            matrices: t.members().iter().map(encode_matrix).collect(),
        }
    }

    fn matrices(&self) -> Result<Vec<ComplexMatrix>> {
        check_version(&self.schema_version)?;
        if self.matrices.len() != self.m || self.m == 0 {
            return Err(Error::Schema(format!("m = {} but {} matrices", self.m, self.matrices.len())));
        }
        let mut out = Vec::with_capacity(self.m);
        for (j, rows) in self.matrices.iter().enumerate() {
            let mat = decode_matrix(rows, &format!("matrix {j}"))?;
            if mat.rows() != self.n || mat.cols() != self.n {
                return Err(Error::Schema(format!(
                    "matrix {j} is {}x{}, expected {}x{}",
                    mat.rows(),
                    mat.cols(),
                    self.n,
                    self.n
                )));
            }
            out.push(mat);
        }
        Ok(out)
    }

    /// Validates the file. Non-Hermitian tuples are routed through the
    /// Hermitian embedding only when `embed` is set.
    pub fn to_tuple(&self, embed: bool) -> Result<LoadedTuple> {
        let mats = self.matrices()?;
        if self.hermitian {
            let mut members = Vec::with_capacity(mats.len());
            for (j, mat) in mats.into_iter().enumerate() {
                let scale = mat.frobenius_norm().max(1.0);
                for i in 0..self.n {
                    for k in i..self.n {
                        let defect = (mat[(i, k)] - mat[(k, i)].conj()).norm();
                        if defect > HERMITIAN_TOL * scale {
                            return Err(Error::NotHermitian {
                                member: j,
                                row: i,
                                col: k,
                                defect,
                            });
                        }
                    }
                }
                members.push(HermitianMatrix::new(mat).map_err(|e| match e {
                    Error::NotHermitian { row, col, defect, .. } => Error::NotHermitian {
                        member: j,
                        row,
                        col,
                        defect,
                    },
                    other => other,
                })?);
            }
            return Ok(LoadedTuple::Hermitian(HermitianTuple::new(members)?));
        }
        let t = ComplexTuple::new(mats)?;
        Ok(if embed {
            LoadedTuple::Hermitian(hermitian_embed(&t))
        } else {
            LoadedTuple::Complex(t)
        })
    }

    /// Hermitian tuple, embedding complex input.
    pub fn to_hermitian(&self) -> Result<HermitianTuple> {
        match self.to_tuple(true)? {
            LoadedTuple::Hermitian(a) => Ok(a),
            LoadedTuple::Complex(_) => unreachable!("embedding was requested"),
        }
    }
}

pub fn parse_tuple(text: &str, embed: bool) -> Result<LoadedTuple> {
    from_json::<TupleFile>(text)?.to_tuple(embed)
}

pub fn load_tuple(path: &Path, embed: bool) -> Result<LoadedTuple> {
    parse_tuple(&read_text(path)?, embed)
}

pub fn save_tuple(a: &HermitianTuple, path: &Path) -> Result<()> {
    write_text(path, &to_canonical_json(&TupleFile::from_hermitian(a))?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub p: usize,
    pub q: usize,
    pub point: Vec<f64>,
    pub residual: f64,
    pub witness: MatrixRows,
}

impl CertificateFile {
    pub fn from_certificate(c: &Certificate) -> Self {
        Self {
            p: c.p,
            q: c.q(),
            point: c.point.flatten(),
            residual: c.residual,
            witness: encode_matrix(c.witness.as_matrix()),
        }
    }

    /// Rebuilds the certificate with the stored residual; call
    /// [`Certificate::revalidate`] before trusting it.
    pub fn to_certificate(&self, m: usize) -> Result<Certificate> {
        let w = decode_matrix(&self.witness, "witness")?;
        if w.cols() != self.p * self.q {
            return Err(Error::Schema(format!(
                "witness has {} columns, expected p*q = {}",
                w.cols(),
                self.p * self.q
            )));
        }
        Ok(Certificate {
            point: MatPoint::from_flat(&self.point, m, self.q)?,
            p: self.p,
            witness: Isometry::new(w).map_err(|e| Error::InvalidCertificate(e.to_string()))?,
            residual: self.residual,
        })
    }
}

/// A standalone certificate together with the tuple it refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub schema_version: String,
    pub kind: String,
    pub m: usize,
    pub flattening: String,
    pub accept_tol: f64,
    pub certificate: CertificateFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<TupleFile>,
}

impl CertificateDoc {
    pub fn new(kind: &str, c: &Certificate, accept_tol: f64, tuple: Option<&HermitianTuple>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            kind: kind.into(),
            m: c.point.m(),
            flattening: FLATTENING_TAG.into(),
            accept_tol,
            certificate: CertificateFile::from_certificate(c),
            tuple: tuple.map(TupleFile::from_hermitian),
        }
    }

    /// Decodes and, when the tuple is embedded, revalidates.
    pub fn load(&self) -> Result<Certificate> {
        check_version(&self.schema_version)?;
        check_flattening(&self.flattening)?;
        let c = self.certificate.to_certificate(self.m)?;
        if let Some(t) = &self.tuple {
            c.revalidate(&t.to_hermitian()?, self.accept_tol)?;
        }
        Ok(c)
    }
}

fn check_flattening(tag: &str) -> Result<()> {
    if tag != FLATTENING_TAG {
        return Err(Error::Schema(format!("unknown flattening {tag:?}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudFile {
    pub schema_version: String,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub flattening: String,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<CertificateFile>>,
    pub provenance: CloudMeta,
    /// The tuple the certificates refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<TupleFile>,
}

impl CloudFile {
    pub fn from_cloud(cloud: &PointCloud, tuple: Option<&HermitianTuple>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            m: cloud.m,
            p: cloud.p,
            q: cloud.q,
            flattening: FLATTENING_TAG.into(),
            points: cloud.flattened(),
            certificates: cloud
                .certificates
                .as_ref()
                .map(|cs| cs.iter().map(CertificateFile::from_certificate).collect()),
            provenance: cloud.meta.clone(),
            tuple: tuple.map(TupleFile::from_hermitian),
        }
    }

    /// Decodes the cloud and revalidates every certificate against the
    /// embedded tuple at the file's `accept_tol`.
    pub fn to_cloud(&self) -> Result<PointCloud> {
        check_version(&self.schema_version)?;
        check_flattening(&self.flattening)?;
        let dim = self.m * self.q * self.q;
        let mut points = Vec::with_capacity(self.points.len());
        for (i, c) in self.points.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::Schema(format!("point {i} has {} coordinates, expected {dim}", c.len())));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("point {i}")));
            }
            points.push(MatPoint::from_flat(c, self.m, self.q)?);
        }
        let certificates = match &self.certificates {
            None => None,
            Some(cs) => {
                if cs.len() != points.len() {
                    return Err(Error::Schema(format!("{} certificates for {} points", cs.len(), points.len())));
                }
                let tuple = self
                    .tuple
                    .as_ref()
                    .ok_or_else(|| Error::Schema("certificates present but no tuple to check them against".into()))?
                    .to_hermitian()?;
                let mut out = Vec::with_capacity(cs.len());
                for (i, cf) in cs.iter().enumerate() {
                    if cf.point != self.points[i] || cf.p != self.p || cf.q != self.q {
                        return Err(Error::InvalidCertificate(format!("certificate {i} does not match its point")));
                    }
                    let c = cf.to_certificate(self.m)?;
                    c.revalidate(&tuple, self.provenance.accept_tol)
                        .map_err(|e| Error::InvalidCertificate(format!("certificate {i}: {e}")))?;
                    out.push(c);
                }
                Some(out)
            }
        };
        Ok(PointCloud {
            m: self.m,
            p: self.p,
            q: self.q,
            points,
            certificates,
            meta: self.provenance.clone(),
        })
    }
}

pub fn cloud_to_json(cloud: &PointCloud, tuple: Option<&HermitianTuple>) -> Result<String> {
    to_canonical_json(&CloudFile::from_cloud(cloud, tuple))
}

pub fn parse_cloud(text: &str) -> Result<PointCloud> {
    from_json::<CloudFile>(text)?.to_cloud()
}

pub fn save_cloud(cloud: &PointCloud, tuple: Option<&HermitianTuple>, path: &Path) -> Result<()> {
    write_text(path, &cloud_to_json(cloud, tuple)?)
}

pub fn load_cloud(path: &Path) -> Result<PointCloud> {
    parse_cloud(&read_text(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryFile {
    pub schema_version: String,
    pub shape: Shape,
    pub angles: Vec<f64>,
    pub support: Vec<f64>,
    pub vertices: Vec<Entry>,
    pub outer_vertices: Vec<Entry>,
    pub hausdorff_gap: f64,
    pub witnesses: Vec<Vec<Entry>>,
}

impl BoundaryFile {
    pub fn from_boundary(b: &Boundary2D) -> Self {
        let enc = |z: &C64| [z.re, z.im];
        Self {
            schema_version: SCHEMA_VERSION.into(),
            shape: b.shape,
            angles: b.angles.clone(),
            support: b.support.clone(),
            vertices: b.vertices.iter().map(enc).collect(),
            outer_vertices: b.outer_vertices().iter().map(enc).collect(),
            hausdorff_gap: b.hausdorff_gap(),
            witnesses: b.witnesses.iter().map(|w| w.iter().map(enc).collect()).collect(),
        }
    }

    pub fn to_boundary(&self) -> Result<Boundary2D> {
        check_version(&self.schema_version)?;
        let dec = |e: &Entry| C64::new(e[0], e[1]);
        Ok(Boundary2D {
            angles: self.angles.clone(),
            vertices: self.vertices.iter().map(dec).collect(),
            support: self.support.clone(),
            witnesses: self.witnesses.iter().map(|w| w.iter().map(dec).collect()).collect(),
            shape: self.shape,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TverbergFile {
    pub schema_version: String,
    pub parts: Vec<Vec<usize>>,
    pub weights: Vec<Vec<f64>>,
    pub block_points: Vec<Vec<f64>>,
    pub partitions_scanned: usize,
    pub cross_tol: f64,
    pub isometry_defect: f64,
    pub certificate: CertificateDoc,
}

impl TverbergFile {
    pub fn new(lift: &TverbergLift, accept_tol: f64, tuple: &HermitianTuple) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            parts: lift.partition.parts.clone(),
            weights: lift.partition.weights.clone(),
            block_points: lift.family.members.iter().map(|c| c.point.flatten()).collect(),
            partitions_scanned: lift.partition.scanned,
            cross_tol: lift.family.cross_tol,
            isometry_defect: lift.certificate.witness.defect(),
            certificate: CertificateDoc::new("tverberg", &lift.certificate, accept_tol, Some(tuple)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssentialFile {
    pub schema_version: String,
    pub q: usize,
    pub r_max: usize,
    pub directions: Vec<Vec<f64>>,
    pub support: Vec<Vec<f64>>,
    pub intersection: Vec<Vec<f64>>,
    pub empty_levels: Vec<usize>,
    pub points_per_level: Vec<usize>,
    /// `[lo, hi]` per level for a single real coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[f64; 2]>>,
}

impl EssentialFile {
    pub fn new(est: &EssentialEstimate) -> Self {
        let r_max = est.support.len();
        let intervals = (est.directions.first().map(Vec::len) == Some(1)).then(|| {
            (1..=r_max)
                .map(|r| {
                    let iv = est.interval(r).expect("one-dimensional estimate");
                    [iv.lo, iv.hi]
                })
                .collect()
        });
        // Infinite values (empty levels) are not valid JSON numbers.
        let finite = |rows: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            rows.iter()
                .map(|r| r.iter().map(|v| if v.is_finite() { *v } else { f64::MIN }).collect())
                .collect()
        };
        Self {
            schema_version: SCHEMA_VERSION.into(),
            q: est.q,
            r_max,
            directions: est.directions.clone(),
            support: finite(&est.support),
            intersection: finite(&est.intersection),
            empty_levels: est.empty_levels.clone(),
            points_per_level: est.clouds.iter().map(PointCloud::len).collect(),
            intervals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{sample_range, SolverOptions};
    use crate::linalg::random::{ginibre, gue_tuple};
    use crate::ranges::numrange_boundary;
    use crate::verify::SuiteReport;

    const IDENTITY2: &str = "{\"schema_version\":\"1\",\"m\":1,\"n\":2,\"hermitian\":true,\"matrices\":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]}\n";

    fn hermitian(text: &str) -> HermitianTuple {
        match parse_tuple(text, false).unwrap() {
            LoadedTuple::Hermitian(a) => a,
            LoadedTuple::Complex(_) => panic!("expected Hermitian"),
        }
    }

    #[test]
    fn identity_file() {
        let a = hermitian(IDENTITY2);
        assert_eq!(a, HermitianTuple::scalar(&[1.0], 2).unwrap());
        assert_eq!(to_canonical_json(&TupleFile::from_hermitian(&a)).unwrap(), IDENTITY2);
    }

    #[test]
    fn non_hermitian_names_entry() {
        let bad = IDENTITY2.replace("[[0.0,0.0],[1.0,0.0]]]]", "[[0.5,0.0],[1.0,0.0]]]]");
        match parse_tuple(&bad, false) {
            Err(Error::NotHermitian { member, row, col, .. }) => assert_eq!((member, row, col), (0, 0, 1)),
            other => panic!("{other:?}"),
        }
        let flagged_off = bad.replace("\"hermitian\":true", "\"hermitian\":false");
        assert!(matches!(parse_tuple(&flagged_off, false).unwrap(), LoadedTuple::Complex(_)));
        match parse_tuple(&flagged_off, true).unwrap() {
            LoadedTuple::Hermitian(a) => assert_eq!(a.m(), 2),
            _ => panic!(),
        }
    }

    #[test]
    fn random_tuple_roundtrip_is_byte_identical() {
        let a = gue_tuple(3, 5, 11);
        let s = to_canonical_json(&TupleFile::from_hermitian(&a)).unwrap();
        let b = hermitian(&s);
        assert_eq!(a, b);
        assert_eq!(to_canonical_json(&TupleFile::from_hermitian(&b)).unwrap(), s);
    }

    #[test]
    fn schema_and_parse_errors() {
        let wrong = IDENTITY2.replace("\"1\"", "\"2\"");
        assert!(matches!(parse_tuple(&wrong, false), Err(Error::Schema(_))));
        let truncated = &IDENTITY2[..40];
        match parse_tuple(truncated, false) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 40),
            other => panic!("{other:?}"),
        }
        let garbage = "{\"schema_version\":\"1\",\"m\":1,x}";
        match parse_tuple(garbage, false) {
            Err(Error::Parse { offset, .. }) => assert_eq!(&garbage[offset..offset + 1], "x"),
            other => panic!("{other:?}"),
        }
        let huge = IDENTITY2.replacen("1.0", "1e999", 1);
        assert!(parse_tuple(&huge, false).is_err());
    }

    #[test]
    fn cloud_roundtrip_and_revalidation() {
        let a = gue_tuple(2, 6, 3);
        let cloud = sample_range(&a, 2, 1, 3, &SolverOptions::default()).unwrap();
        let s = cloud_to_json(&cloud, Some(&a)).unwrap();
        let back = parse_cloud(&s).unwrap();
        assert_eq!(back, cloud);
        assert_eq!(cloud_to_json(&back, Some(&a)).unwrap(), s);
        for (x, y) in back.certificates.unwrap().iter().zip(cloud.certificates.unwrap()) {
            assert!((x.residual - y.residual).abs() <= 1e-12);
        }
        // Tampered witness entry fails revalidation.
        let mut f: CloudFile = from_json(&s).unwrap();
        f.certificates.as_mut().unwrap()[0].witness[0][0][0] += 1e-3;
        assert!(f.to_cloud().is_err());
        // Certificates need the tuple.
        let mut f: CloudFile = from_json(&s).unwrap();
        f.tuple = None;
        assert!(matches!(f.to_cloud(), Err(Error::Schema(_))));
    }

    #[test]
    fn empty_and_truncated_cloud() {
        let a = gue_tuple(1, 4, 3);
        let mut cloud = sample_range(&a, 1, 1, 0, &SolverOptions::default()).unwrap();
        cloud.certificates = Some(Vec::new());
        let s = cloud_to_json(&cloud, Some(&a)).unwrap();
        assert!(parse_cloud(&s).unwrap().is_empty());
        assert!(matches!(parse_cloud(&s[..s.len() / 2]), Err(Error::Parse { .. })));
    }

    #[test]
    fn file_roundtrip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let a = gue_tuple(2, 3, 1);
        save_tuple(&a, &path).unwrap();
        match load_tuple(&path, false).unwrap() {
            LoadedTuple::Hermitian(b) => assert_eq!(a, b),
            _ => panic!(),
        }
        let cloud = sample_range(&a, 1, 1, 2, &SolverOptions::default()).unwrap();
        let cp = dir.path().join("c.json");
        save_cloud(&cloud, Some(&a), &cp).unwrap();
        assert_eq!(load_cloud(&cp).unwrap(), cloud);
        assert!(matches!(load_tuple(&dir.path().join("missing"), false), Err(Error::Io(_))));
    }

    #[test]
    fn certificate_and_boundary_docs() {
        let a = gue_tuple(2, 6, 3);
        let cloud = sample_range(&a, 1, 2, 1, &SolverOptions::default()).unwrap();
        let c = &cloud.certificates.unwrap()[0];
        let doc = CertificateDoc::new("sample", c, 1e-8, Some(&a));
        let s = to_canonical_json(&doc).unwrap();
        let back: CertificateDoc = from_json(&s).unwrap();
        assert_eq!(&back.load().unwrap(), c);

        let b = numrange_boundary(&ginibre(4, 2), 16).unwrap();
        let f = BoundaryFile::from_boundary(&b);
        let s = to_canonical_json(&f).unwrap();
        assert_eq!(from_json::<BoundaryFile>(&s).unwrap().to_boundary().unwrap(), b);
    }

    #[test]
    fn report_roundtrip() {
        let cfg = crate::verify::SuiteConfig::default();
        let r = crate::verify::check_nonempty_bounds(1, 2, 3, true, &cfg).unwrap();
        let s = to_canonical_json(&r).unwrap();
        assert_eq!(from_json::<SuiteReport>(&s).unwrap(), r);
    }
}
