//! Numerical laboratory for norm inequalities between sums of matrix
//! geometric means and the block matrix `Z = [B_i^{1/2} (Σ A_k) B_j^{1/2}]`.
//!
//! Routines are generic over [`scalar::Real`]; the aliases below fix the
//! scalar to `f64`, which is what the suite and the explorer use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod error;
pub mod explorer;
pub mod linalg;
pub mod means;
pub mod norms;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
pub use scalar::{DoubleDouble, Real};

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Hermitian = linalg::HermitianMatrix<f64>;
pub type Spd = linalg::SpdMatrix<f64>;
pub type Instance = blocks::InstanceSet<f64>;
pub type SingularValues = norms::SingularValueList<f64>;
pub type Lemma = suite::LemmaCase<f64>;

/// Double-double counterparts used for extended-precision checks.
pub type MatrixDD = linalg::ComplexMatrix<DoubleDouble>;
pub type SpdDD = linalg::SpdMatrix<DoubleDouble>;
pub type InstanceDD = blocks::InstanceSet<DoubleDouble>;
