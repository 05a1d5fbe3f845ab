//! Generalized numerical ranges of Hermitian tuples.
//!
//! For `A = (A_1, …, A_m)` Hermitian `n x n`, the `(p,q)`-matricial range
//! `Λ_{p,q}(A)` is the set of tuples `B = (B_1, …, B_m)` of Hermitian
//! `q x q` matrices such that `X*A_jX = I_p ⊗ B_j` for some `n x pq`
//! isometry `X`. `q = 1` gives the rank-p joint range, `p = q = 1` the joint
//! numerical range.
//!
//! Membership is checked numerically and every positive answer carries a
//! [`Certificate`] that can be re-validated independently.

pub mod constructions;
pub mod error;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod par;
pub mod point;
pub mod ranges;
pub mod tverberg;
pub mod verify;

pub use error::{Error, Result};
pub use feasibility::{Certificate, Outcome, Rejection, SolverOptions, Target};
pub use linalg::{ComplexMatrix, HermitianMatrix, HermitianTuple, Isometry, C64};
pub use point::{AffineMap, MatPoint, PointCloud, ScalarPoint};
