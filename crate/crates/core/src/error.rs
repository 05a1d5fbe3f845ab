use thiserror::Error;

/// Errors raised by the library.
///
/// `Rejection`-style outcomes of the heuristic solver are not errors; they are
/// returned as [`crate::feasibility::Outcome::Rejected`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// `p*q` (or a derived block size) does not fit in the ambient dimension.
    #[error("structurally infeasible: need dimension {required}, have {available} ({context})")]
    Structural {
        required: usize,
        available: usize,
        context: String,
    },

    #[error("matrix is not Hermitian: member {member}, entry ({row}, {col}) differs from its conjugate transpose by {defect:e}")]
    NotHermitian {
        member: usize,
        row: usize,
        col: usize,
        defect: f64,
    },

    #[error("rank deficiency at column {column} (residual norm {norm:e})")]
    RankDeficient { column: usize, norm: f64 },

    #[error("matrix has non-orthonormal columns (defect {defect:e})")]
    NotIsometry { defect: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("singular transform (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("witnesses are not cross-orthogonal (defect {defect:e}); re-solve the second point with deflated_solve")]
    CrossOrthogonality { defect: f64 },

    #[error("linear program exceeded its iteration cap ({0} pivots)")]
    IterationCap(usize),

    #[error("no feasible partition among {scanned} scanned")]
    NoPartition { scanned: usize },

    #[error("stage {stage} failed: best residual {best_residual:e}")]
    StageFailed { stage: usize, best_residual: f64 },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("certificate failed revalidation: {0}")]
    InvalidCertificate(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
