use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigenDecomposition, HermitianMatrix, LinalgConfig, SpdMatrix};
use crate::scalar::Real;

/// Applies `λ ↦ λ^x` to a decomposition under the clipping rules: for
/// `x >= 0`, eigenvalues within the clip floor of zero become zero (so
/// `H^0` is the support projection); for
/// `x < 0` the spectrum must clear the definiteness floor.
pub(crate) fn power_from_eig<T: Real>(
    eig: &EigenDecomposition<T>,
    x: T,
    cfg: &LinalgConfig<T>,
) -> Result<HermitianMatrix<T>> {
    let powered = powered_spectrum(&eig.eigenvalues, x, cfg)?;
    Ok(eig.with_spectrum(&powered))
}

/// The spectrum of `H^x` (descending for `x >= 0`) under the same rules as
/// [`matrix_power`], without forming the matrix.
pub fn powered_spectrum<T: Real>(eigenvalues: &[T], x: T, cfg: &LinalgConfig<T>) -> Result<Vec<T>> {
    let lmax = eigenvalues.iter().fold(T::zero(), |acc, &l| acc.max(l));
    let lmin = eigenvalues.iter().fold(lmax, |acc, &l| acc.min(l));
    if x < T::zero() {
        if !(lmin > cfg.pd_floor * lmax) {
            return Err(Error::SingularForNegativePower {
                min_eigenvalue: lmin.to_f64(),
            });
        }
        return Ok(eigenvalues.iter().map(|&l| l.powf(x)).collect());
    }
    let clip = cfg.clip_floor * lmax;
    eigenvalues
        .iter()
        .map(|&l| {
            if l < -clip {
                Err(Error::NotPositiveSemidefinite { eigenvalue: l.to_f64() })
            } else if l <= clip {
                Ok(T::zero())
            } else if x == T::zero() {
                Ok(T::one())
            } else if x == T::one() {
                Ok(l)
            } else {
                Ok(l.powf(x))
            }
        })
        .collect()
}

/// `H^x = V · diag(λ_i^x) · V*` for Hermitian `H` with nonnegative spectrum.
pub fn matrix_power<T: Real>(h: &HermitianMatrix<T>, x: T) -> Result<HermitianMatrix<T>> {
    matrix_power_with(h, x, &LinalgConfig::default())
}

pub fn matrix_power_with<T: Real>(h: &HermitianMatrix<T>, x: T, cfg: &LinalgConfig<T>) -> Result<HermitianMatrix<T>> {
    if x == T::one() {
        return Ok(h.clone());
    }
    let eig = hermitian_eig(h)?;
    power_from_eig(&eig, x, cfg)
}

/// `|M| = (M*M)^{1/2}`.
pub fn matrix_abs<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianMatrix<T>> {
    m.require_square()?;
    let gram = HermitianMatrix::symmetrize(&(&m.adjoint() * m));
    matrix_power(&gram, T::from_f64(0.5))
}

/// Unitary factor `U` of the polar decomposition `M = U |M|`.
pub fn polar_unitary<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    polar_unitary_with(m, &LinalgConfig::default())
}

pub fn polar_unitary_with<T: Real>(m: &ComplexMatrix<T>, cfg: &LinalgConfig<T>) -> Result<ComplexMatrix<T>> {
    m.require_square()?;
    let gram = HermitianMatrix::symmetrize(&(&m.adjoint() * m));
    let eig = hermitian_eig(&gram)?;
    // singular values are square roots of the Gram spectrum
    let smax = eig.max_eigenvalue().max(T::zero()).sqrt();
    let smin = eig.min_eigenvalue().max(T::zero()).sqrt();
    if !(smin > cfg.pd_floor * smax) {
        return Err(Error::SingularInput(format!(
            "smallest singular value {:e} vs largest {:e}",
            smin.to_f64(),
            smax.to_f64()
        )));
    }
    let inv_abs = eig.apply(|l| T::one() / l.sqrt());
    Ok(m * inv_abs.matrix())
}

/// Definiteness verdict with the smallest eigenvalue that decided it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefinitenessReport<T: Real> {
    pub positive_definite: bool,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
}

/// True iff `λ_min > tol · max(1, λ_max)`.
pub fn is_positive_definite<T: Real>(h: &HermitianMatrix<T>, tol: T) -> Result<DefinitenessReport<T>> {
    let eig = hermitian_eig(h)?;
    let (lmin, lmax) = (eig.min_eigenvalue(), eig.max_eigenvalue());
    Ok(DefinitenessReport {
        positive_definite: lmin > tol * T::one().max(lmax),
        min_eigenvalue: lmin,
        max_eigenvalue: lmax,
    })
}

/// `λ_max / λ_min`.
pub fn condition_number<T: Real>(h: &SpdMatrix<T>) -> T {
    h.condition_number()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Complex;

    fn real_matrix(n: usize, entries: &[f64]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_real(n, n, entries).unwrap()
    }

    #[test]
    fn square_root_of_diagonal() {
        let h = HermitianMatrix::from_real_diagonal(&[4.0, 9.0]);
        let r = matrix_power(&h, 0.5).unwrap();
        assert!(r.matrix().max_abs_diff(&real_matrix(2, &[2.0, 0.0, 0.0, 3.0])) < 1e-15);
    }

    #[test]
    fn identity_exponent_returns_input() {
        let h = HermitianMatrix::new(real_matrix(2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let r = matrix_power(&h, 1.0).unwrap();
        assert!(r.matrix().max_abs_diff(h.matrix()) <= 1e-14);
    }

    #[test]
    fn square_root_closed_form() {
        // eigenbasis (1, ±1)/√2 with eigenvalues 3 and 1
        let h = HermitianMatrix::new(real_matrix(2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let r = matrix_power(&h, 0.5).unwrap();
        let s3 = 3f64.sqrt();
        let expected = real_matrix(
            2,
            &[(s3 + 1.0) / 2.0, (s3 - 1.0) / 2.0, (s3 - 1.0) / 2.0, (s3 + 1.0) / 2.0],
        );
        assert!(r.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn negative_power_of_singular_rejected() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            matrix_power(&h, -0.5),
            Err(Error::SingularForNegativePower { .. })
        ));
        // nonnegative power of PSD is fine
        let r = matrix_power(&h, 0.5).unwrap();
        assert_eq!(r.matrix()[(1, 1)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn clipping_and_negative_spectrum() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -1e-14]);
        let r = matrix_power(&h, 0.5).unwrap();
        assert_eq!(r.matrix()[(1, 1)].re, 0.0);
        let bad = HermitianMatrix::from_real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(
            matrix_power(&bad, 0.5),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn integer_power_matches_products() {
        let h = HermitianMatrix::new(real_matrix(3, &[3.0, 1.0, 0.5, 1.0, 2.0, 0.25, 0.5, 0.25, 1.0])).unwrap();
        let cube = matrix_power(&h, 3.0).unwrap();
        let direct = &(h.matrix() * h.matrix()) * h.matrix();
        let rel = cube.matrix().max_abs_diff(&direct) / direct.max_abs();
        assert!(rel < 1e-10);
    }

    #[test]
    fn abs_examples() {
        let a = matrix_abs(&real_matrix(2, &[-3.0, 0.0, 0.0, 2.0])).unwrap();
        assert!(a.matrix().max_abs_diff(&real_matrix(2, &[3.0, 0.0, 0.0, 2.0])) < 1e-15);
        let nil = matrix_abs(&real_matrix(2, &[0.0, 2.0, 0.0, 0.0])).unwrap();
        assert!(nil.matrix().max_abs_diff(&real_matrix(2, &[0.0, 0.0, 0.0, 2.0])) < 1e-15);
        let rot = real_matrix(2, &[0.0, -1.0, 1.0, 0.0]);
        let id = matrix_abs(&rot).unwrap();
        assert!(id.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn polar_examples() {
        let pd = real_matrix(2, &[2.0, 1.0, 1.0, 2.0]);
        assert!(polar_unitary(&pd).unwrap().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        let m = real_matrix(2, &[0.0, -2.0, 3.0, 0.0]);
        let u = polar_unitary(&m).unwrap();
        assert!(u.max_abs_diff(&real_matrix(2, &[0.0, -1.0, 1.0, 0.0])) < 1e-15);
        let unitary = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex::new(0.0, 1.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(-1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(polar_unitary(&unitary).unwrap().max_abs_diff(&unitary) < 1e-15);
        assert!(matches!(
            polar_unitary(&real_matrix(2, &[1.0, 0.0, 0.0, 0.0])),
            Err(Error::SingularInput(_))
        ));
    }

    #[test]
    fn definiteness_examples() {
        let id = HermitianMatrix::<f64>::identity(2);
        assert!(is_positive_definite(&id, 1e-10).unwrap().positive_definite);
        let semi = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(!is_positive_definite(&semi, 1e-10).unwrap().positive_definite);
        let indef = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        let rep = is_positive_definite(&indef, 1e-10).unwrap();
        assert!(!rep.positive_definite);
        assert_eq!(rep.min_eigenvalue, -1.0);
    }

    #[test]
    fn condition_examples() {
        assert_eq!(condition_number(&SpdMatrix::<f64>::identity(3)), 1.0);
        assert_eq!(
            condition_number(&SpdMatrix::from_real_diagonal(&[10.0, 1.0]).unwrap()),
            10.0
        );
    }
}
