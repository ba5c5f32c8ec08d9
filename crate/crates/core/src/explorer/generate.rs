use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::blocks::{InstanceKind, InstanceSet};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, SpdMatrix};
use crate::suite::{LemmaCase, LemmaId};

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of task `index` under `base`: `splitmix64(base ^ splitmix64(index))`.
pub fn task_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distribution of eigenvalues for generated positive definite matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum SpectrumLaw {
    /// `exp(U[ln lo, ln hi])`.
    Loguniform { lo: f64, hi: f64 },
}

impl Default for SpectrumLaw {
    fn default() -> Self {
        SpectrumLaw::Loguniform { lo: 0.1, hi: 10.0 }
    }
}

impl SpectrumLaw {
    pub fn validate(&self) -> Result<()> {
        let SpectrumLaw::Loguniform { lo, hi } = *self;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidSpectrumLaw(format!(
                "loguniform({lo}, {hi}) needs 0 < lo <= hi < inf"
            )));
        }
        Ok(())
    }

    pub fn bounds(&self) -> (f64, f64) {
        let SpectrumLaw::Loguniform { lo, hi } = *self;
        (lo, hi)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let (lo, hi) = self.bounds();
        let u: f64 = rng.random();
        (lo.ln() + u * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
    }
}

fn gaussian(rng: &mut impl Rng) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im)
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Modified Gram–Schmidt on the columns.
pub(crate) fn orthonormalize(m: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
    let n = m.rows();
    let mut cols: Vec<Vec<Complex<f64>>> = (0..m.cols()).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    #[allow(clippy::needless_range_loop)]
    for j in 0..cols.len() {
        for k in 0..j {
            let proj = (0..n).fold(Complex::new(0.0, 0.0), |acc, i| acc + cols[k][i].conj() * cols[j][i]);
            for i in 0..n {
                let c = cols[k][i];
                cols[j][i] -= proj * c;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(n, m.cols(), |i, j| cols[j][i])
}

/// Orthonormalized complex Gaussian matrix.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
    orthonormalize(&gaussian_matrix(n, n, rng))
}

pub(crate) fn with_spectrum(q: &ComplexMatrix<f64>, spectrum: &[f64]) -> Result<SpdMatrix<f64>> {
    let d = ComplexMatrix::from_real_diagonal(spectrum);
    let m = &(q * &d) * &q.adjoint();
    SpdMatrix::new(HermitianMatrix::symmetrize(&m))
}

fn random_spd(n: usize, law: &SpectrumLaw, rng: &mut impl Rng) -> Result<SpdMatrix<f64>> {
    let q = haar_unitary(n, rng);
    let spectrum: Vec<f64> = (0..n).map(|_| law.sample(rng)).collect();
    with_spectrum(&q, &spectrum)
}

/// Draws `m` pairs of `n × n` positive definite matrices. Commuting pairs
/// share one eigenbasis per pair.
pub fn generate_instance(
    kind: InstanceKind,
    n: usize,
    m: usize,
    seed: u64,
    law: &SpectrumLaw,
) -> Result<InstanceSet<f64>> {
    law.validate()?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig(format!(
            "instance shape n={n}, m={m} must be positive"
        )));
    }
    let mut rng = rng_for(seed);
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        match kind {
            InstanceKind::Generic => {
                a.push(random_spd(n, law, &mut rng)?);
                b.push(random_spd(n, law, &mut rng)?);
            }
            InstanceKind::Commuting => {
                let q = haar_unitary(n, &mut rng);
                let la: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
                let lb: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
                a.push(with_spectrum(&q, &la)?);
                b.push(with_spectrum(&q, &lb)?);
            }
        }
    }
    InstanceSet::new(kind, seed, a, b)
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Normal matrix `Q diag(z) Q*` with complex Gaussian `z`.
fn random_normal(n: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
    let q = haar_unitary(n, rng);
    let d = ComplexMatrix::from_fn(n, n, |i, j| if i == j { gaussian(rng) } else { Complex::new(0.0, 0.0) });
    &(&q * &d) * &q.adjoint()
}

/// Draws a case satisfying the hypotheses of `id`. Blocked lemmas use `m`
/// blocks (or terms) of size `n`.
pub fn generate_lemma_case(id: LemmaId, n: usize, m: usize, seed: u64, law: &SpectrumLaw) -> Result<LemmaCase<f64>> {
    law.validate()?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig(format!(
            "lemma shape n={n}, m={m} must be positive"
        )));
    }
    let mut rng = rng_for(seed);
    let rng = &mut rng;
    let case = match id {
        LemmaId::Araki => LemmaCase::Araki {
            a: random_spd(n, law, rng)?,
            b: random_spd(n, law, rng)?,
            p: uniform(rng, 0.25, 3.0),
            q: uniform(rng, 1.0, 3.0),
        },
        LemmaId::BlockNormal => {
            let dim = n * m;
            let z = if rng.random::<bool>() {
                gaussian_matrix(dim, dim, rng).hermitian_part()
            } else {
                let mut z = ComplexMatrix::zeros(dim, dim);
                for i in 0..m {
                    for j in 0..m {
                        z.set_block(i, j, &random_normal(n, rng));
                    }
                }
                z
            };
            LemmaCase::BlockNormal { z, m, n }
        }
        LemmaId::Hoelder => LemmaCase::Hoelder {
            x: gaussian_matrix(n, n, rng),
            y: gaussian_matrix(n, n, rng),
            q: uniform(rng, 1.1, 4.0),
        },
        LemmaId::NormalProduct => {
            let p = random_spd(n, law, rng)?;
            let normal = random_normal(n, rng);
            let p_inv = p.spd_power(-1.0)?;
            LemmaCase::NormalProduct {
                a: p.matrix().clone(),
                b: p_inv.matrix() * &normal,
            }
        }
        LemmaId::PowerMonotoneFamily => {
            let a = random_spd(n, law, rng)?;
            let candidate = random_spd(n, law, rng)?;
            let mut la = a.eig().eigenvalues.clone();
            let mut lb = candidate.eig().eigenvalues.clone();
            la.sort_by(|x, y| y.total_cmp(x));
            lb.sort_by(|x, y| y.total_cmp(x));
            let mut shift: f64 = 0.0;
            let (mut sa, mut sb) = (0.0, 0.0);
            for k in 0..n {
                sa += la[k];
                sb += lb[k];
                shift = shift.max((sa - sb) / (k + 1) as f64);
            }
            let b = if shift > 0.0 {
                let c = shift * (1.0 + 1e-6) + 1e-9 * la[0];
                let shifted = candidate.hermitian().add(&HermitianMatrix::identity(n).scale(c));
                SpdMatrix::new(shifted)?
            } else {
                candidate
            };
            LemmaCase::PowerMonotoneFamily {
                a,
                b,
                r: uniform(rng, 1.0, 3.0),
            }
        }
        LemmaId::GramSwap => LemmaCase::GramSwap {
            y: gaussian_matrix(n, n, rng),
            a: uniform(rng, 0.0, 3.0),
        },
        LemmaId::ConvexSubadd => LemmaCase::ConvexSubadd {
            terms: (0..m).map(|_| random_spd(n, law, rng)).collect::<Result<_>>()?,
            r: uniform(rng, 1.0, 3.0),
        },
        LemmaId::ConcaveSubaddBU => LemmaCase::ConcaveSubaddBU {
            a: random_spd(n, law, rng)?,
            b: random_spd(n, law, rng)?,
            theta: 1.0 - rng.random::<f64>(),
        },
        LemmaId::AUBPower => LemmaCase::AUBPower {
            a: random_spd(n, law, rng)?,
            b: random_spd(n, law, rng)?,
            u: haar_unitary(n, rng),
            q: uniform(rng, 1.0, 3.0),
        },
        LemmaId::BlockDiagStep => {
            let mut a = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(m);
            for _ in 0..m {
                a.push(random_spd(n, law, rng)?);
                b.push(random_spd(n, law, rng)?);
            }
            LemmaCase::BlockDiagStep {
                a,
                b,
                s: uniform(rng, 1.1, 4.0),
            }
        }
    };
    Ok(case)
}
