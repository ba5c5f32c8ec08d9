use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cabs, real, Complex, Real};

const MAX_SWEEPS: usize = 60;

/// Relative tolerances for the Hermitian/definiteness invariants.
///
/// Defaults are calibrated for `f64` and rescaled by unit roundoff for other
/// formats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinalgConfig<T: Real> {
    /// Allowed `‖H - H*‖_max` relative to `‖H‖_max`.
    pub hermitian_tol: T,
    /// An SPD matrix needs `λ_min > pd_floor · λ_max`.
    pub pd_floor: T,
    /// Eigenvalues within `clip_floor · λ_max` of zero are treated as zero by
    /// nonnegative powers.
    pub clip_floor: T,
}

impl<T: Real> Default for LinalgConfig<T> {
    fn default() -> Self {
        Self {
            hermitian_tol: T::rescale_tol(1e-12),
            pd_floor: T::rescale_tol(1e-10),
            clip_floor: T::rescale_tol(1e-12),
        }
    }
}

/// Square matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    base: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::new_with(m, &LinalgConfig::default())
    }

    /// Validates the Hermitian invariant and stores the exact Hermitian part.
    pub fn new_with(m: ComplexMatrix<T>, cfg: &LinalgConfig<T>) -> Result<Self> {
        m.require_square()?;
        let deviation = m.hermitian_deviation();
        let tolerance = cfg.hermitian_tol * m.max_abs();
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation: deviation.to_f64(),
                tolerance: tolerance.to_f64(),
            });
        }
        Ok(Self {
            base: m.hermitian_part(),
        })
    }

    /// Projects onto the Hermitian part without checking. For matrices that
    /// are Hermitian by construction up to rounding.
    pub fn symmetrize(m: &ComplexMatrix<T>) -> Self {
        assert!(m.is_square());
        Self {
            base: m.hermitian_part(),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        Self {
            base: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            base: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.base
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.base
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            base: &self.base + &other.base,
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            base: self.base.scale(factor),
        }
    }

    /// `M H M*`, Hermitian by construction.
    pub fn congruence(&self, m: &ComplexMatrix<T>) -> Self {
        Self::symmetrize(&(&(m * &self.base) * &m.adjoint()))
    }

    pub fn cast<U: Real>(&self) -> HermitianMatrix<U> {
        HermitianMatrix { base: self.base.cast() }
    }

    pub fn eig(&self) -> Result<EigenDecomposition<T>> {
        hermitian_eig(self)
    }
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// `V · diag(f(λ_i)) · V*`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let weights: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_spectrum(&weights)
    }

    /// `V · diag(w) · V*` for a replacement spectrum `w`.
    pub fn with_spectrum(&self, weights: &[T]) -> HermitianMatrix<T> {
        let v = &self.vectors;
        let n = v.rows();
        assert_eq!(weights.len(), n);
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::zero();
                for (k, &w) in weights.iter().enumerate() {
                    if w != T::zero() {
                        acc = acc + v[(i, k)] * v[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = real(out[(i, i)].re);
        }
        HermitianMatrix { base: out }
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.apply(|l| l)
    }
}

/// Hermitian positive definite matrix with its spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix<T: Real> {
    herm: HermitianMatrix<T>,
    eig: EigenDecomposition<T>,
}

impl<T: Real> SpdMatrix<T> {
    pub fn new(h: HermitianMatrix<T>) -> Result<Self> {
        Self::new_with(h, &LinalgConfig::default())
    }

    pub fn new_with(h: HermitianMatrix<T>, cfg: &LinalgConfig<T>) -> Result<Self> {
        let eig = hermitian_eig(&h)?;
        let (hi, lo) = (eig.max_eigenvalue(), eig.min_eigenvalue());
        if !(hi > T::zero() && lo > cfg.pd_floor * hi) {
            return Err(Error::SingularInput(format!(
                "smallest eigenvalue {:e} vs largest {:e}",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        Ok(Self { herm: h, eig })
    }

    pub fn from_matrix(m: ComplexMatrix<T>) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn from_real_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real_diagonal(&vec![T::one(); n]).expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.herm
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.herm.matrix()
    }

    pub fn eig(&self) -> &EigenDecomposition<T> {
        &self.eig
    }

    pub fn condition_number(&self) -> T {
        self.eig.max_eigenvalue() / self.eig.min_eigenvalue()
    }

    /// `V · diag(λ^x) · V*` from the stored decomposition.
    pub fn power(&self, x: T) -> HermitianMatrix<T> {
        if x == T::one() {
            return self.herm.clone();
        }
        if x == T::zero() {
            return HermitianMatrix::identity(self.dim());
        }
        self.eig.apply(|l| l.powf(x))
    }

    /// `H^x` as an SPD matrix, sharing this eigenbasis. Fails if the powered
    /// spectrum breaches the definiteness floor.
    pub fn spd_power(&self, x: T) -> Result<SpdMatrix<T>> {
        if x == T::one() {
            return Ok(self.clone());
        }
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        if x < T::zero() {
            order.reverse();
        }
        let eigenvalues: Vec<T> = order.iter().map(|&i| self.eig.eigenvalues[i].powf(x)).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |r, c| self.eig.vectors[(r, order[c])]);
        let eig = EigenDecomposition { eigenvalues, vectors };
        let (hi, lo) = (eig.max_eigenvalue(), eig.min_eigenvalue());
        if !(lo > LinalgConfig::<T>::default().pd_floor * hi) {
            return Err(Error::SingularInput(format!(
                "power {x} has smallest eigenvalue {:e} vs largest {:e}",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        Ok(Self {
            herm: eig.reconstruct(),
            eig,
        })
    }

    /// `λ_min`.
    pub fn min_eigenvalue(&self) -> T {
        self.eig.min_eigenvalue()
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eig.max_eigenvalue()
    }

    pub fn cast<U: Real>(&self) -> Result<SpdMatrix<U>> {
        SpdMatrix::new(self.herm.cast())
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Off-diagonal entries below `eps · sqrt(|a_pp a_qq|)` are neglected, which
/// keeps small eigenvalues of well-scaled positive definite matrices
/// accurate to high relative precision.
pub fn hermitian_eig<T: Real>(h: &HermitianMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::<T>::identity(n);
    let eps = T::epsilon();
    let tiny = eps * eps * a.frobenius_norm();
    let two = T::from_f64(2.0);

    let mut converged = n == 1;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let r = cabs(g);
                if r.is_zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r <= eps * (app.abs() * aqq.abs()).sqrt() || r <= tiny {
                    a[(p, q)] = Complex::zero();
                    a[(q, p)] = Complex::zero();
                    continue;
                }
                rotated = true;
                let e = g / r;
                let theta = (aqq - app) / (two * r);
                let t = {
                    let mag = T::one() / (theta.abs() + (T::one() + theta * theta).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let ec = e.conj();

                // A <- A Q with Q = [[c, s], [-s conj(e), c conj(e)]] on (p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ec * s;
                    a[(k, q)] = akp * s + akq * ec * c;
                }
                // A <- Q* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * e * s;
                    a[(q, k)] = apk * s + aqk * e * c;
                }
                a[(p, p)] = real(app - t * r);
                a[(q, q)] = real(aqq + t * r);
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ec * s;
                    v[(k, q)] = vkp * s + vkq * ec * c;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable: ties keep solver order.
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |row, col| v[(row, order[col])]);
    Ok(EigenDecomposition { eigenvalues, vectors })
}
