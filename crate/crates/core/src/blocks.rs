//! The block matrix `Z` with blocks `B_i^{1/2} (Σ_k A_k) B_j^{1/2}`, its
//! factor `Y`, and the `n x n` reduced core carrying its nonzero spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianMatrix, SpdMatrix};
use crate::scalar::{Complex, Real};

/// Commuting instances share an eigenbasis within each pair `(A_i, B_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Generic,
    Commuting,
}

/// `m` pairs of `n x n` positive definite matrices and the seed that made
/// them.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSet<T: Real> {
    m: usize,
    n: usize,
    a: Vec<SpdMatrix<T>>,
    b: Vec<SpdMatrix<T>>,
    seed: u64,
    kind: InstanceKind,
}

/// `‖AB − BA‖_F / (‖A‖_F ‖B‖_F)`.
pub fn commutator_defect<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let c = &(a * b) - &(b * a);
    c.frobenius_norm() / (a.frobenius_norm() * b.frobenius_norm())
}

impl<T: Real> InstanceSet<T> {
    pub fn new(kind: InstanceKind, seed: u64, a: Vec<SpdMatrix<T>>, b: Vec<SpdMatrix<T>>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        let n = a[0].dim();
        for x in a.iter().chain(&b) {
            if x.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: x.dim(),
                });
            }
        }
        if kind == InstanceKind::Commuting {
            let tol = T::rescale_tol(1e-12);
            for (i, (x, y)) in a.iter().zip(&b).enumerate() {
                let defect = commutator_defect(x.matrix(), y.matrix());
                if defect > tol {
                    return Err(Error::NotCommuting(format!(
                        "pair {i} has relative commutator {:e}",
                        defect.to_f64()
                    )));
                }
            }
        }
        Ok(Self {
            m: a.len(),
            n,
            a,
            b,
            seed,
            kind,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[SpdMatrix<T>] {
        &self.a
    }

    pub fn b(&self) -> &[SpdMatrix<T>] {
        &self.b
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    /// `Σ A_i`.
    pub fn sum_a(&self) -> Result<SpdMatrix<T>> {
        sum_spd(&self.a)
    }

    /// `Σ B_i`.
    pub fn sum_b(&self) -> Result<SpdMatrix<T>> {
        sum_spd(&self.b)
    }

    /// Re-decomposes every matrix in another scalar type.
    pub fn cast<U: Real>(&self) -> Result<InstanceSet<U>> {
        let conv = |v: &[SpdMatrix<T>]| v.iter().map(|x| x.cast::<U>()).collect::<Result<Vec<_>>>();
        Ok(InstanceSet {
            m: self.m,
            n: self.n,
            a: conv(&self.a)?,
            b: conv(&self.b)?,
            seed: self.seed,
            kind: self.kind,
        })
    }
}

pub(crate) fn sum_spd<T: Real>(xs: &[SpdMatrix<T>]) -> Result<SpdMatrix<T>> {
    let mut acc = xs[0].hermitian().clone();
    for x in &xs[1..] {
        acc = acc.add(x.hermitian());
    }
    SpdMatrix::new(acc)
}

/// Serialized instance: every matrix as row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub kind: InstanceKind,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: Vec<Vec<[f64; 2]>>,
}

fn matrix_entries(x: &SpdMatrix<f64>) -> Vec<[f64; 2]> {
    x.matrix().data().iter().map(|z| [z.re, z.im]).collect()
}

fn spd_from_entries(n: usize, entries: &[[f64; 2]]) -> Result<SpdMatrix<f64>> {
    let data = entries.iter().map(|&[re, im]| Complex::new(re, im)).collect();
    SpdMatrix::from_matrix(ComplexMatrix::new(n, n, data)?)
}

impl From<&InstanceSet<f64>> for InstanceRecord {
    fn from(inst: &InstanceSet<f64>) -> Self {
        Self {
            kind: inst.kind,
            seed: inst.seed,
            n: inst.n,
            m: inst.m,
            a: inst.a.iter().map(matrix_entries).collect(),
            b: inst.b.iter().map(matrix_entries).collect(),
        }
    }
}

impl TryFrom<&InstanceRecord> for InstanceSet<f64> {
    type Error = Error;

    fn try_from(r: &InstanceRecord) -> Result<Self> {
        let conv = |v: &[Vec<[f64; 2]>]| v.iter().map(|e| spd_from_entries(r.n, e)).collect::<Result<Vec<_>>>();
        let inst = InstanceSet::new(r.kind, r.seed, conv(&r.a)?, conv(&r.b)?)?;
        if inst.m != r.m {
            return Err(Error::MalformedReport(format!(
                "instance has {} pairs, header says {}",
                inst.m, r.m
            )));
        }
        Ok(inst)
    }
}

/// Hermitian positive semidefinite `mn x mn` matrix built from `m x m`
/// blocks of size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix<T: Real> {
    pub m: usize,
    pub n: usize,
    pub data: HermitianMatrix<T>,
}

impl<T: Real> BlockMatrix<T> {
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix<T> {
        self.data.matrix().block(i, j, self.n)
    }
}

fn half_powers<T: Real>(xs: &[SpdMatrix<T>]) -> Vec<ComplexMatrix<T>> {
    let half = T::from_f64(0.5);
    xs.iter().map(|x| x.power(half).into_matrix()).collect()
}

fn build_z_matrix<T: Real>(inst: &InstanceSet<T>) -> Result<ComplexMatrix<T>> {
    let (m, n) = (inst.m, inst.n);
    let sum_a = inst.sum_a()?;
    let b_half = half_powers(&inst.b);
    let mut z = ComplexMatrix::zeros(m * n, m * n);
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        let left = &b_half[i] * sum_a.matrix();
        for j in i..m {
            let block = &left * &b_half[j];
            z.set_block(i, j, &block);
            if j != i {
                z.set_block(j, i, &block.adjoint());
            }
        }
    }
    Ok(z)
}

/// `Z` with `Z_ij = B_i^{1/2} (Σ A_k) B_j^{1/2}`.
pub fn build_z<T: Real>(inst: &InstanceSet<T>) -> Result<BlockMatrix<T>> {
    let data = HermitianMatrix::symmetrize(&build_z_matrix(inst)?);
    let eig = hermitian_eig(&data)?;
    let floor = T::rescale_tol(1e-10) * eig.max_eigenvalue();
    if eig.min_eigenvalue() < -floor {
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: eig.min_eigenvalue().to_f64(),
        });
    }
    Ok(BlockMatrix {
        m: inst.m,
        n: inst.n,
        data,
    })
}

/// `Y = [B_1^{1/2} 0 ...; ...; B_m^{1/2} 0 ...] · [A_1^{1/2} ... A_m^{1/2}; 0 ...]`,
/// so that block `(i, j)` is `B_i^{1/2} A_j^{1/2}`.
pub fn build_y<T: Real>(inst: &InstanceSet<T>) -> Result<ComplexMatrix<T>> {
    let (m, n) = (inst.m, inst.n);
    let mut col = ComplexMatrix::zeros(m * n, m * n);
    let mut row = ComplexMatrix::zeros(m * n, m * n);
    for (i, (bh, ah)) in half_powers(&inst.b).iter().zip(half_powers(&inst.a)).enumerate() {
        col.set_block(i, 0, bh);
        row.set_block(0, i, &ah);
    }
    Ok(&col * &row)
}

/// `(Σ A)^{1/2} (Σ B) (Σ A)^{1/2}`.
pub fn reduced_core<T: Real>(inst: &InstanceSet<T>) -> Result<SpdMatrix<T>> {
    reduced_core_from_sums(&inst.sum_a()?, &inst.sum_b()?)
}

pub(crate) fn reduced_core_from_sums<T: Real>(sum_a: &SpdMatrix<T>, sum_b: &SpdMatrix<T>) -> Result<SpdMatrix<T>> {
    let root = sum_a.power(T::from_f64(0.5));
    SpdMatrix::new(sum_b.hermitian().congruence(root.matrix()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// `‖Z − YY*‖_F / ‖Z‖_F`.
    pub factorization_defect: f64,
    /// Largest gap between `spec(Z)` and `spec(core) ∪ {0}`, over `λ_max(Z)`.
    pub spectrum_defect: f64,
    pub pass: bool,
}

/// Checks `Z = YY*` and `Z = KK* ≅ K*K = core ⊕ 0` on the literal `mn x mn`
/// matrices.
pub fn verify_equivalences<T: Real>(inst: &InstanceSet<T>, tol: T) -> Result<EquivalenceReport> {
    let (m, n) = (inst.m, inst.n);
    let z = build_z(inst)?;
    let zm = z.data.matrix();
    let y = build_y(inst)?;
    let yy = &y * &y.adjoint();
    let znorm = zm.frobenius_norm();
    let factorization_defect = (zm - &yy).frobenius_norm() / znorm;

    // K = [B_1^{1/2} 0 ...; ...] · ((Σ A)^{1/2} ⊕ 0): only the first block
    // column is nonzero.
    let sum_a = inst.sum_a()?;
    let root = sum_a.power(T::from_f64(0.5));
    let mut k = ComplexMatrix::zeros(m * n, m * n);
    for (i, bh) in half_powers(&inst.b).iter().enumerate() {
        k.set_block(i, 0, &(bh * root.matrix()));
    }
    let kk = &k * &k.adjoint();
    let ktk = &k.adjoint() * &k;
    let core = reduced_core(inst)?;
    let mut core_padded = ComplexMatrix::zeros(m * n, m * n);
    core_padded.set_block(0, 0, core.matrix());

    let z_eig = hermitian_eig(&z.data)?;
    let lmax = z_eig.max_eigenvalue();
    let mut expected = core.eig().eigenvalues.clone();
    expected.resize(m * n, T::zero());
    let mut spectrum_defect = T::zero();
    for (l, e) in z_eig.eigenvalues.iter().zip(&expected) {
        spectrum_defect = spectrum_defect.max((*l - *e).abs());
    }
    spectrum_defect = spectrum_defect
        .max((zm - &kk).max_abs())
        .max((&ktk - &core_padded).max_abs());
    let spectrum_defect = spectrum_defect / lmax;

    let (fd, sd) = (factorization_defect.to_f64(), spectrum_defect.to_f64());
    let tol = tol.to_f64();
    Ok(EquivalenceReport {
        factorization_defect: fd,
        spectrum_defect: sd,
        pass: fd <= tol && sd <= tol,
    })
}
