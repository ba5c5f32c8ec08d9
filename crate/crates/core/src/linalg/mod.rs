//! Dense complex Hermitian linear algebra.

mod functions;
mod hermitian;
mod matrix;

pub use functions::{
    condition_number, is_positive_definite, matrix_abs, matrix_power, matrix_power_with, polar_unitary,
    polar_unitary_with, powered_spectrum, DefinitenessReport,
};
pub use hermitian::{hermitian_eig, EigenDecomposition, HermitianMatrix, LinalgConfig, SpdMatrix};
pub use matrix::ComplexMatrix;
