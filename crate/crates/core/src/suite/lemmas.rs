use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, matrix_abs, powered_spectrum, ComplexMatrix, HermitianMatrix, LinalgConfig, SpdMatrix,
};
use crate::means::geometric_mean_unitary;
use crate::norms::{hermitian_singular_values, ky_fan_dominance, singular_values, NormSpec, SingularValueList};
use crate::scalar::{DoubleDouble, Real};

use super::{Recheck, SuiteConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    Araki,
    BlockNormal,
    Hoelder,
    NormalProduct,
    PowerMonotoneFamily,
    GramSwap,
    ConvexSubadd,
    #[serde(rename = "concave-subadd-bu")]
    ConcaveSubaddBU,
    #[serde(rename = "aub-power")]
    AUBPower,
    BlockDiagStep,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Araki,
        LemmaId::BlockNormal,
        LemmaId::Hoelder,
        LemmaId::NormalProduct,
        LemmaId::PowerMonotoneFamily,
        LemmaId::GramSwap,
        LemmaId::ConvexSubadd,
        LemmaId::ConcaveSubaddBU,
        LemmaId::AUBPower,
        LemmaId::BlockDiagStep,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            LemmaId::Araki => "araki",
            LemmaId::BlockNormal => "block-normal",
            LemmaId::Hoelder => "hoelder",
            LemmaId::NormalProduct => "normal-product",
            LemmaId::PowerMonotoneFamily => "power-monotone-family",
            LemmaId::GramSwap => "gram-swap",
            LemmaId::ConvexSubadd => "convex-subadd",
            LemmaId::ConcaveSubaddBU => "concave-subadd-bu",
            LemmaId::AUBPower => "aub-power",
            LemmaId::BlockDiagStep => "block-diag-step",
        }
    }
}

/// Operands of one lemma instance.
#[derive(Clone, Debug, PartialEq)]
pub enum LemmaCase<T: Real> {
    /// `‖(BAB)^{pq}‖ ≤ ‖(B^q A^q B^q)^p‖`, `q ≥ 1`, `p > 0`.
    Araki {
        a: SpdMatrix<T>,
        b: SpdMatrix<T>,
        p: f64,
        q: f64,
    },
    /// `‖Z‖ ≤ ‖Σ_{ij} |Z_ij|‖` for Hermitian `Z` or normal blocks.
    BlockNormal { z: ComplexMatrix<T>, m: usize, n: usize },
    /// `‖XY‖ ≤ ‖|X|^q‖^{1/q} ‖|Y|^s‖^{1/s}` with `1/q + 1/s = 1`.
    Hoelder {
        x: ComplexMatrix<T>,
        y: ComplexMatrix<T>,
        q: f64,
    },
    /// `‖AB‖ ≤ ‖BA‖` when `AB` is normal.
    NormalProduct { a: ComplexMatrix<T>, b: ComplexMatrix<T> },
    /// Ky Fan dominance of `A` by `B` carries over to `A^r`, `B^r`, `r ≥ 1`.
    PowerMonotoneFamily { a: SpdMatrix<T>, b: SpdMatrix<T>, r: f64 },
    /// `‖(Y*Y)^a‖ = ‖(YY*)^a‖`, `a ≥ 0`.
    GramSwap { y: ComplexMatrix<T>, a: f64 },
    /// `‖Σ A_i^r‖ ≤ ‖(Σ A_i)^r‖`, `r ≥ 1`.
    ConvexSubadd { terms: Vec<SpdMatrix<T>>, r: f64 },
    /// `‖(A + B)^θ‖ ≤ ‖A^θ + B^θ‖`, `θ ∈ (0, 1]`.
    ConcaveSubaddBU {
        a: SpdMatrix<T>,
        b: SpdMatrix<T>,
        theta: f64,
    },
    /// `‖|AUB|^q‖ ≤ ‖|A^q U B^q|‖`, `U` unitary, `q ≥ 1`.
    AUBPower {
        a: SpdMatrix<T>,
        b: SpdMatrix<T>,
        u: ComplexMatrix<T>,
        q: f64,
    },
    /// `‖|X|^q‖ ≤ ‖Σ |A_i^{s/2} U_i B_i^{s/2}|‖` with
    /// `X = ⊕ A_i^{(s−1)/2} U_i B_i^{(s−1)/2}`, `U_i` the unitary of
    /// `A_i^s ♯ B_i^s`, and `q = s/(s−1)`.
    BlockDiagStep {
        a: Vec<SpdMatrix<T>>,
        b: Vec<SpdMatrix<T>>,
        s: f64,
    },
}

fn violation(msg: String) -> Error {
    Error::HypothesisViolation(msg)
}

fn normality_defect<T: Real>(x: &ComplexMatrix<T>) -> T {
    let xa = x.adjoint();
    let d = &(x * &xa) - &(&xa * x);
    d.frobenius_norm() / (x.frobenius_norm() * x.frobenius_norm()).max(T::rescale_tol(1e-300))
}

fn cast_all<T: Real, U: Real>(xs: &[SpdMatrix<T>]) -> Result<Vec<SpdMatrix<U>>> {
    xs.iter().map(|x| x.cast()).collect()
}

impl<T: Real> LemmaCase<T> {
    pub fn id(&self) -> LemmaId {
        match self {
            LemmaCase::Araki { .. } => LemmaId::Araki,
            LemmaCase::BlockNormal { .. } => LemmaId::BlockNormal,
            LemmaCase::Hoelder { .. } => LemmaId::Hoelder,
            LemmaCase::NormalProduct { .. } => LemmaId::NormalProduct,
            LemmaCase::PowerMonotoneFamily { .. } => LemmaId::PowerMonotoneFamily,
            LemmaCase::GramSwap { .. } => LemmaId::GramSwap,
            LemmaCase::ConvexSubadd { .. } => LemmaId::ConvexSubadd,
            LemmaCase::ConcaveSubaddBU { .. } => LemmaId::ConcaveSubaddBU,
            LemmaCase::AUBPower { .. } => LemmaId::AUBPower,
            LemmaCase::BlockDiagStep { .. } => LemmaId::BlockDiagStep,
        }
    }

    /// `(n, m)`: block size and block count (`m = 1` when unblocked).
    pub fn shape(&self) -> (usize, usize) {
        match self {
            LemmaCase::Araki { a, .. }
            | LemmaCase::PowerMonotoneFamily { a, .. }
            | LemmaCase::ConcaveSubaddBU { a, .. }
            | LemmaCase::AUBPower { a, .. } => (a.dim(), 1),
            LemmaCase::BlockNormal { m, n, .. } => (*n, *m),
            LemmaCase::Hoelder { x, .. } => (x.rows(), 1),
            LemmaCase::NormalProduct { a, .. } => (a.rows(), 1),
            LemmaCase::GramSwap { y, .. } => (y.rows(), 1),
            LemmaCase::ConvexSubadd { terms, .. } => (terms[0].dim(), terms.len()),
            LemmaCase::BlockDiagStep { a, .. } => (a[0].dim(), a.len()),
        }
    }

    /// Dimension of the space the norms act on.
    pub fn ambient_dim(&self) -> usize {
        let (n, m) = self.shape();
        match self {
            LemmaCase::BlockNormal { .. } | LemmaCase::BlockDiagStep { .. } => n * m,
            _ => n,
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            LemmaCase::Araki { p, q, .. } => vec![("p", p), ("q", q)],
            LemmaCase::Hoelder { q, .. } => vec![("q", q), ("s", q / (q - 1.0))],
            LemmaCase::PowerMonotoneFamily { r, .. } | LemmaCase::ConvexSubadd { r, .. } => vec![("r", r)],
            LemmaCase::GramSwap { a, .. } => vec![("a", a)],
            LemmaCase::ConcaveSubaddBU { theta, .. } => vec![("theta", theta)],
            LemmaCase::AUBPower { q, .. } => vec![("q", q)],
            LemmaCase::BlockDiagStep { s, .. } => vec![("s", s), ("q", s / (s - 1.0))],
            LemmaCase::BlockNormal { .. } | LemmaCase::NormalProduct { .. } => vec![],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Verifies the hypotheses of the cited statement.
    pub fn check(&self) -> Result<()> {
        match self {
            LemmaCase::Araki { a, b, p, q } => {
                same_dim(a.dim(), b.dim())?;
                if !(*q >= 1.0 && *p > 0.0) {
                    return Err(violation(format!("Araki needs q >= 1, p > 0; got q={q}, p={p}")));
                }
            }
            LemmaCase::BlockNormal { z, m, n } => {
                same_dim(z.rows(), m * n)?;
                let hermitian = z.hermitian_deviation() <= T::rescale_tol(1e-12) * z.max_abs();
                let normal_blocks =
                    (0..*m).all(|i| (0..*m).all(|j| normality_defect(&z.block(i, j, *n)) <= T::rescale_tol(1e-10)));
                if !(hermitian || normal_blocks) {
                    return Err(violation(
                        "block matrix is neither Hermitian nor made of normal blocks".into(),
                    ));
                }
            }
            LemmaCase::Hoelder { x, y, q } => {
                same_dim(x.rows(), y.rows())?;
                if !(*q > 1.0 && q.is_finite()) {
                    return Err(violation(format!("Hoelder needs q > 1, got {q}")));
                }
            }
            LemmaCase::NormalProduct { a, b } => {
                same_dim(a.rows(), b.rows())?;
                let defect = normality_defect(&(a * b));
                if defect > T::rescale_tol(1e-10) {
                    return Err(violation(format!("AB is not normal: defect {:e}", defect.to_f64())));
                }
            }
            LemmaCase::PowerMonotoneFamily { a, b, r } => {
                same_dim(a.dim(), b.dim())?;
                if *r < 1.0 {
                    return Err(violation(format!("power monotonicity needs r >= 1, got {r}")));
                }
                let premise = ky_fan_dominance(a.matrix(), b.matrix(), T::rescale_tol(1e-12))?;
                if !premise.dominated {
                    return Err(violation(format!(
                        "premise fails: Ky Fan {} margin {:e}",
                        premise.worst_k, premise.worst_margin
                    )));
                }
            }
            LemmaCase::GramSwap { a, .. } => {
                if *a < 0.0 {
                    return Err(violation(format!("Gram swap needs a >= 0, got {a}")));
                }
            }
            LemmaCase::ConvexSubadd { terms, r } => {
                if terms.is_empty() || *r < 1.0 {
                    return Err(violation(format!(
                        "convex subadditivity needs terms and r >= 1, got r={r}"
                    )));
                }
                for t in terms {
                    same_dim(t.dim(), terms[0].dim())?;
                }
            }
            LemmaCase::ConcaveSubaddBU { a, b, theta } => {
                same_dim(a.dim(), b.dim())?;
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(violation(format!("concave power needs theta in (0, 1], got {theta}")));
                }
            }
            LemmaCase::AUBPower { a, b, u, q } => {
                same_dim(a.dim(), b.dim())?;
                same_dim(a.dim(), u.rows())?;
                if *q < 1.0 {
                    return Err(violation(format!("|AUB|^q lemma needs q >= 1, got {q}")));
                }
                let defect = u.unitarity_defect();
                if defect > T::rescale_tol(1e-10) {
                    return Err(Error::NotUnitary {
                        defect: defect.to_f64(),
                    });
                }
            }
            LemmaCase::BlockDiagStep { a, b, s } => {
                same_dim(a.len(), b.len())?;
                if a.is_empty() || !(*s > 1.0 && s.is_finite()) {
                    return Err(violation(format!(
                        "block-diagonal step needs pairs and s > 1, got s={s}"
                    )));
                }
                for x in a.iter().chain(b) {
                    same_dim(x.dim(), a[0].dim())?;
                }
            }
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Result<LemmaCase<U>> {
        Ok(match self {
            LemmaCase::Araki { a, b, p, q } => LemmaCase::Araki {
                a: a.cast()?,
                b: b.cast()?,
                p: *p,
                q: *q,
            },
            LemmaCase::BlockNormal { z, m, n } => LemmaCase::BlockNormal {
                z: z.cast(),
                m: *m,
                n: *n,
            },
            LemmaCase::Hoelder { x, y, q } => LemmaCase::Hoelder {
                x: x.cast(),
                y: y.cast(),
                q: *q,
            },
            LemmaCase::NormalProduct { a, b } => LemmaCase::NormalProduct {
                a: a.cast(),
                b: b.cast(),
            },
            LemmaCase::PowerMonotoneFamily { a, b, r } => LemmaCase::PowerMonotoneFamily {
                a: a.cast()?,
                b: b.cast()?,
                r: *r,
            },
            LemmaCase::GramSwap { y, a } => LemmaCase::GramSwap { y: y.cast(), a: *a },
            LemmaCase::ConvexSubadd { terms, r } => LemmaCase::ConvexSubadd {
                terms: cast_all(terms)?,
                r: *r,
            },
            LemmaCase::ConcaveSubaddBU { a, b, theta } => LemmaCase::ConcaveSubaddBU {
                a: a.cast()?,
                b: b.cast()?,
                theta: *theta,
            },
            LemmaCase::AUBPower { a, b, u, q } => LemmaCase::AUBPower {
                a: a.cast()?,
                b: b.cast()?,
                u: u.cast(),
                q: *q,
            },
            LemmaCase::BlockDiagStep { a, b, s } => LemmaCase::BlockDiagStep {
                a: cast_all(a)?,
                b: cast_all(b)?,
                s: *s,
            },
        })
    }

    fn sides(&self) -> Result<LemmaSides<T>> {
        let cfg = LinalgConfig::<T>::default();
        let pw = |sv: &SingularValueList<T>, x: f64| -> SingularValueList<T> {
            let x = T::from_f64(x);
            SingularValueList::from_unsorted(
                sv.values()
                    .iter()
                    .map(|&v| if v.is_zero() { v } else { v.powf(x) })
                    .collect(),
            )
        };
        let spd_spectrum = |h: &HermitianMatrix<T>, x: f64| -> Result<SingularValueList<T>> {
            let eig = hermitian_eig(h)?;
            Ok(SingularValueList::from_unsorted(powered_spectrum(
                &eig.eigenvalues,
                T::from_f64(x),
                &cfg,
            )?))
        };
        let lists = |lhs, rhs| Ok(LemmaSides::Lists { lhs, rhs });
        match self {
            LemmaCase::Araki { a, b, p, q } => {
                let bab = a.hermitian().congruence(b.matrix());
                let qt = T::from_f64(*q);
                let inner = a.power(qt).congruence(b.power(qt).matrix());
                lists(spd_spectrum(&bab, p * q)?, spd_spectrum(&inner, *p)?)
            }
            LemmaCase::BlockNormal { z, m, n } => {
                let lhs = if z.hermitian_deviation() <= T::rescale_tol(1e-12) * z.max_abs() {
                    hermitian_singular_values(&HermitianMatrix::symmetrize(z))?
                } else {
                    singular_values(z)?
                };
                let mut acc = HermitianMatrix::symmetrize(&ComplexMatrix::zeros(*n, *n));
                for i in 0..*m {
                    for j in 0..*m {
                        acc = acc.add(&matrix_abs(&z.block(i, j, *n))?);
                    }
                }
                lists(lhs, hermitian_singular_values(&acc)?)
            }
            LemmaCase::Hoelder { x, y, q } => {
                let s = q / (q - 1.0);
                Ok(LemmaSides::Hoelder {
                    xy: singular_values(&(x * y))?,
                    xq: pw(&singular_values(x)?, *q),
                    ys: pw(&singular_values(y)?, s),
                    q: *q,
                    s,
                })
            }
            LemmaCase::NormalProduct { a, b } => lists(singular_values(&(a * b))?, singular_values(&(b * a))?),
            LemmaCase::PowerMonotoneFamily { a, b, r } => {
                let ev = |x: &SpdMatrix<T>| SingularValueList::from_unsorted(x.eig().eigenvalues.clone());
                lists(pw(&ev(a), *r), pw(&ev(b), *r))
            }
            LemmaCase::GramSwap { y, a } => {
                let ya = y.adjoint();
                let left = HermitianMatrix::symmetrize(&(&ya * y));
                let right = HermitianMatrix::symmetrize(&(y * &ya));
                lists(spd_spectrum(&left, *a)?, spd_spectrum(&right, *a)?)
            }
            LemmaCase::ConvexSubadd { terms, r } => {
                let rt = T::from_f64(*r);
                let mut lhs = terms[0].power(rt);
                let mut sum = terms[0].hermitian().clone();
                for t in &terms[1..] {
                    lhs = lhs.add(&t.power(rt));
                    sum = sum.add(t.hermitian());
                }
                lists(hermitian_singular_values(&lhs)?, spd_spectrum(&sum, *r)?)
            }
            LemmaCase::ConcaveSubaddBU { a, b, theta } => {
                let th = T::from_f64(*theta);
                let sum = a.hermitian().add(b.hermitian());
                let rhs = a.power(th).add(&b.power(th));
                lists(spd_spectrum(&sum, *theta)?, hermitian_singular_values(&rhs)?)
            }
            LemmaCase::AUBPower { a, b, u, q } => {
                let qt = T::from_f64(*q);
                let aub = &(a.matrix() * u) * b.matrix();
                let aqubq = &(a.power(qt).matrix() * u) * b.power(qt).matrix();
                lists(pw(&singular_values(&aub)?, *q), singular_values(&aqubq)?)
            }
            LemmaCase::BlockDiagStep { a, b, s } => {
                let st = T::from_f64(*s);
                let outer = T::from_f64((s - 1.0) / 2.0);
                let half = T::from_f64(s / 2.0);
                let n = a[0].dim();
                let mut x_blocks = Vec::with_capacity(a.len());
                let mut acc = HermitianMatrix::symmetrize(&ComplexMatrix::zeros(n, n));
                for (ai, bi) in a.iter().zip(b) {
                    let u = geometric_mean_unitary(&ai.spd_power(st)?, &bi.spd_power(st)?)?;
                    x_blocks.push(&(ai.power(outer).matrix() * &u) * bi.power(outer).matrix());
                    let y = &(ai.power(half).matrix() * &u) * bi.power(half).matrix();
                    acc = acc.add(&matrix_abs(&y)?);
                }
                let x = ComplexMatrix::block_diagonal(&x_blocks);
                lists(
                    pw(&singular_values(&x)?, s / (s - 1.0)),
                    hermitian_singular_values(&acc)?,
                )
            }
        }
    }
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

enum LemmaSides<T: Real> {
    Lists {
        lhs: SingularValueList<T>,
        rhs: SingularValueList<T>,
    },
    Hoelder {
        xy: SingularValueList<T>,
        xq: SingularValueList<T>,
        ys: SingularValueList<T>,
        q: f64,
        s: f64,
    },
}

impl<T: Real> LemmaSides<T> {
    fn values(&self, norm: NormSpec, dim: usize) -> Result<(f64, f64)> {
        match self {
            LemmaSides::Lists { lhs, rhs } => Ok((lhs.norm(norm, dim)?.to_f64(), rhs.norm(norm, dim)?.to_f64())),
            LemmaSides::Hoelder { xy, xq, ys, q, s } => {
                let lhs = xy.norm(norm, dim)?;
                let fx = xq.norm(norm, dim)?;
                let fy = ys.norm(norm, dim)?;
                let pow = |v: T, e: f64| if v.is_zero() { v } else { v.powf(T::from_f64(e)) };
                let rhs = pow(fx, 1.0 / q) * pow(fy, 1.0 / s);
                Ok((lhs.to_f64(), rhs.to_f64()))
            }
        }
    }
}

/// One lemma instance evaluated under one norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub instance_seed: u64,
    pub n: usize,
    pub m: usize,
    pub params: BTreeMap<String, f64>,
    pub norm: NormSpec,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub pass: bool,
    pub violation_candidate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recheck: Option<Recheck>,
}

impl LemmaReport {
    pub fn normalized_margin(&self) -> f64 {
        let m = if self.lemma_id == LemmaId::GramSwap {
            -self.margin.abs()
        } else {
            self.margin
        };
        m / self.rhs.max(1.0)
    }
}

fn lemma_passes(id: LemmaId, cfg: &SuiteConfig, margin: f64, rhs: f64) -> bool {
    if id == LemmaId::GramSwap {
        margin.abs() <= cfg.tol_rel * rhs.max(1.0)
    } else {
        cfg.passes(&[margin], rhs)
    }
}

/// Evaluates a lemma under every norm in `norms`, re-checking failures in
/// double-double arithmetic.
pub fn eval_lemma_norms(
    case: &LemmaCase<f64>,
    norms: &[NormSpec],
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<Vec<LemmaReport>> {
    case.check()?;
    let id = case.id();
    let dim = case.ambient_dim();
    let (n, m) = case.shape();
    for norm in norms {
        norm.validate(dim)?;
    }
    let sides = case.sides()?;
    let params = case.params();
    let mut reports = Vec::with_capacity(norms.len());
    for &norm in norms {
        let (lhs, rhs) = sides.values(norm, dim)?;
        let margin = rhs - lhs;
        let pass = lemma_passes(id, cfg, margin, rhs);
        reports.push(LemmaReport {
            lemma_id: id,
            instance_seed: seed,
            n,
            m,
            params: params.clone(),
            norm,
            lhs,
            rhs,
            margin,
            pass,
            violation_candidate: !pass,
            recheck: None,
        });
    }
    if cfg.recheck && reports.iter().any(|r| !r.pass) {
        let ext = case.cast::<DoubleDouble>()?.sides()?;
        for rep in reports.iter_mut().filter(|r| !r.pass) {
            let (lhs, rhs) = ext.values(rep.norm, dim)?;
            let margin = rhs - lhs;
            let pass = lemma_passes(id, cfg, margin, rhs);
            rep.pass = pass;
            rep.violation_candidate = !pass;
            rep.recheck = Some(Recheck {
                lhs,
                mid: None,
                rhs,
                margins: vec![margin],
                pass,
            });
        }
    }
    Ok(reports)
}

pub fn eval_lemma(case: &LemmaCase<f64>, norm: NormSpec) -> Result<LemmaReport> {
    Ok(eval_lemma_norms(case, &[norm], &SuiteConfig::default(), 0)?.remove(0))
}
