//! Weighted geometric means of positive definite matrices.
//!
//! `A ♯_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}` for `t ∈ [0, 1]`,
//! evaluated with two nested spectral decompositions.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianMatrix, LinalgConfig, SpdMatrix};
use crate::scalar::Real;

/// Weight of the mean; `t = 1/2` is the ordinary geometric mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanParams<T: Real> {
    t: T,
}

impl<T: Real> MeanParams<T> {
    pub fn new(t: T) -> Result<Self> {
        if t >= T::zero() && t <= T::one() {
            Ok(Self { t })
        } else {
            Err(Error::HypothesisViolation(format!(
                "mean weight t = {} outside [0, 1]",
                t
            )))
        }
    }

    pub fn half() -> Self {
        Self { t: T::from_f64(0.5) }
    }

    pub fn t(&self) -> T {
        self.t
    }
}

fn check_dims<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `A ♯_t B` as a Hermitian matrix, without re-validating definiteness.
///
/// Evaluated in the eigenbasis `A = V Λ V*`: the inner matrix is
/// `Λ^{-1/2} (V* B V) Λ^{-1/2}`, a diagonal scaling, so its small eigenvalues
/// keep their relative accuracy when `A` is ill-conditioned.
pub(crate) fn t_geometric_mean_hermitian<T: Real>(
    a: &SpdMatrix<T>,
    b: &SpdMatrix<T>,
    t: T,
) -> Result<HermitianMatrix<T>> {
    check_dims(a, b)?;
    let n = a.dim();
    let eig = a.eig();
    let v = &eig.vectors;
    let w = b.hermitian().congruence(&v.adjoint());
    let d: Vec<T> = eig.eigenvalues.iter().map(|l| l.sqrt()).collect();
    let inner = HermitianMatrix::symmetrize(&ComplexMatrix::from_fn(n, n, |i, j| w.matrix()[(i, j)] / (d[i] * d[j])));
    let inner_eig = hermitian_eig(&inner)?;
    let clip = LinalgConfig::<T>::default().clip_floor * inner_eig.max_eigenvalue();
    let mut powered = Vec::with_capacity(n);
    for &l in &inner_eig.eigenvalues {
        if l > T::zero() {
            powered.push(if t == T::one() { l } else { l.powf(t) });
        } else if l >= -clip {
            powered.push(if t == T::zero() { T::one() } else { T::zero() });
        } else {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: l.to_f64() });
        }
    }
    let inner_t = inner_eig.with_spectrum(&powered);
    let rescaled = ComplexMatrix::from_fn(n, n, |i, j| inner_t.matrix()[(i, j)] * (d[i] * d[j]));
    Ok(HermitianMatrix::symmetrize(&rescaled).congruence(v))
}

/// `A ♯_t B`.
pub fn t_geometric_mean<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>, t: MeanParams<T>) -> Result<SpdMatrix<T>> {
    SpdMatrix::new(t_geometric_mean_hermitian(a, b, t.t())?)
}

/// `A ♯ B`.
pub fn geometric_mean<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<SpdMatrix<T>> {
    t_geometric_mean(a, b, MeanParams::half())
}

/// The unitary `U = A^{-1/2} (A ♯ B) B^{-1/2}`, so that
/// `A ♯ B = A^{1/2} U B^{1/2}`.
pub fn geometric_mean_unitary<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<ComplexMatrix<T>> {
    let mean = t_geometric_mean_hermitian(a, b, T::from_f64(0.5))?;
    let half = T::from_f64(0.5);
    let left = a.power(-half);
    let right = b.power(-half);
    Ok(&(left.matrix() * mean.matrix()) * right.matrix())
}
