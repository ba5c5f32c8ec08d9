use std::collections::HashMap;

use crate::blocks::{reduced_core_from_sums, InstanceKind, InstanceSet};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, powered_spectrum, ComplexMatrix, EigenDecomposition, HermitianMatrix, LinalgConfig, SpdMatrix,
};
use crate::means::t_geometric_mean_hermitian;
use crate::norms::{hermitian_singular_values, singular_values, NormSpec, SingularValueList};
use crate::scalar::{DoubleDouble, Real};

use super::{chain_margins, ChainId, ChainParams, ChainReport, Recheck, Status, SuiteConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutingVariant {
    /// Right side `‖(Σ A)(Σ B)‖`.
    Product,
    /// Right side `‖(Σ A)^{1/2} (Σ B) (Σ A)^{1/2}‖`.
    Symmetrized,
}

impl CommutingVariant {
    pub fn chain_id(self) -> ChainId {
        match self {
            CommutingVariant::Product => ChainId::CommutingProduct,
            CommutingVariant::Symmetrized => ChainId::CommutingSymmetrized,
        }
    }
}

/// Proven regimes: `s = 1, r ≥ 1` (any `t`, `p > 0`) and the main theorem
/// `s ≥ 2, t = 1/2, r ≥ 1, rp ≥ 1`.
pub fn t_chain_status(params: &ChainParams) -> Status {
    let ChainParams { s, r, p, t } = *params;
    if (s == 1.0 && r >= 1.0 && p > 0.0) || (s >= 2.0 && t == 0.5 && r >= 1.0 && r * p >= 1.0) {
        Status::Proven
    } else {
        Status::Conjectured
    }
}

struct Sides<T: Real> {
    lhs: SingularValueList<T>,
    mid: Option<SingularValueList<T>>,
    rhs: SingularValueList<T>,
}

type PowerPair<T> = (Vec<SpdMatrix<T>>, Vec<SpdMatrix<T>>);

/// Spectral data of one instance, with powers and means cached by exponent.
struct Context<T: Real> {
    inst: InstanceSet<T>,
    sum_a: SpdMatrix<T>,
    sum_b: SpdMatrix<T>,
    core: SpdMatrix<T>,
    powers: HashMap<u64, PowerPair<T>>,
    means: HashMap<(u64, u64), Vec<EigenDecomposition<T>>>,
}

fn psd_values<T: Real>(h: &HermitianMatrix<T>) -> Result<SingularValueList<T>> {
    hermitian_singular_values(h)
}

fn sum_hermitian<T: Real>(terms: impl IntoIterator<Item = HermitianMatrix<T>>) -> HermitianMatrix<T> {
    terms
        .into_iter()
        .reduce(|acc, h| acc.add(&h))
        .expect("at least one term")
}

impl<T: Real> Context<T> {
    fn new(inst: InstanceSet<T>) -> Result<Self> {
        let sum_a = inst.sum_a()?;
        let sum_b = inst.sum_b()?;
        let core = reduced_core_from_sums(&sum_a, &sum_b)?;
        Ok(Self {
            inst,
            sum_a,
            sum_b,
            core,
            powers: HashMap::new(),
            means: HashMap::new(),
        })
    }

    fn ensure_powers(&mut self, s: f64) -> Result<()> {
        if !self.powers.contains_key(&s.to_bits()) {
            let st = T::from_f64(s);
            let pow = |xs: &[SpdMatrix<T>]| xs.iter().map(|x| x.spd_power(st)).collect::<Result<Vec<_>>>();
            let entry = (pow(self.inst.a())?, pow(self.inst.b())?);
            self.powers.insert(s.to_bits(), entry);
        }
        Ok(())
    }

    /// Eigendecompositions of `A_i^s ♯_t B_i^s`.
    fn means(&mut self, s: f64, t: f64) -> Result<&[EigenDecomposition<T>]> {
        let key = (s.to_bits(), t.to_bits());
        if !self.means.contains_key(&key) {
            self.ensure_powers(s)?;
            let (pa, pb) = &self.powers[&s.to_bits()];
            let tt = T::from_f64(t);
            let eigs = pa
                .iter()
                .zip(pb)
                .map(|(x, y)| t_geometric_mean_hermitian(x, y, tt).and_then(|g| hermitian_eig(&g)))
                .collect::<Result<Vec<_>>>()?;
            self.means.insert(key, eigs);
        }
        Ok(&self.means[&key])
    }

    /// `Σ (A_i^s ♯_t B_i^s)^r`.
    fn mean_sum_power(&mut self, s: f64, t: f64, r: f64) -> Result<SingularValueList<T>> {
        let cfg = LinalgConfig::default();
        let rr = T::from_f64(r);
        let terms = self
            .means(s, t)?
            .iter()
            .map(|e| Ok(e.with_spectrum(&powered_spectrum(&e.eigenvalues, rr, &cfg)?)))
            .collect::<Result<Vec<_>>>()?;
        psd_values(&sum_hermitian(terms))
    }

    /// Nonzero spectrum of `Z^x`, read from the reduced core.
    fn z_power(&self, x: f64) -> Result<SingularValueList<T>> {
        let values = powered_spectrum(&self.core.eig().eigenvalues, T::from_f64(x), &LinalgConfig::default())?;
        Ok(SingularValueList::from_unsorted(values))
    }

    /// `((Σ A)^{(1−t)srp/2} (Σ B)^{tsrp} (Σ A)^{(1−t)srp/2})^{1/p}`, formed in
    /// the eigenbasis of `Σ A` so the outer factors are diagonal scalings.
    fn t_rhs(&self, params: &ChainParams) -> Result<SingularValueList<T>> {
        let ChainParams { s, r, p, t } = *params;
        let cfg = LinalgConfig::default();
        let a_exp = T::from_f64((1.0 - t) * s * r * p / 2.0);
        let b_exp = T::from_f64(t * s * r * p);
        let ea = self.sum_a.eig();
        let eb = self.sum_b.eig();
        let n = self.inst.n();
        let sb = eb.with_spectrum(&powered_spectrum(&eb.eigenvalues, b_exp, &cfg)?);
        let w = sb.congruence(&ea.vectors.adjoint());
        let d = powered_spectrum(&ea.eigenvalues, a_exp, &cfg)?;
        let inner =
            HermitianMatrix::symmetrize(&ComplexMatrix::from_fn(n, n, |i, j| w.matrix()[(i, j)] * (d[i] * d[j])));
        let eig = hermitian_eig(&inner)?;
        let clamped: Vec<T> = eig.eigenvalues.iter().map(|&l| l.max(T::zero())).collect();
        let values = powered_spectrum(&clamped, T::one() / T::from_f64(p), &cfg)?;
        Ok(SingularValueList::from_unsorted(values))
    }

    fn commuting(&self, variant: CommutingVariant) -> Result<Sides<T>> {
        let half = T::from_f64(0.5);
        let a = self.inst.a();
        let b = self.inst.b();
        let products = a
            .iter()
            .zip(b)
            .map(|(x, y)| HermitianMatrix::symmetrize(&(x.matrix() * y.matrix())));
        let lhs = psd_values(&sum_hermitian(products))?;
        let roots = a
            .iter()
            .zip(b)
            .map(|(x, y)| HermitianMatrix::symmetrize(&(x.power(half).matrix() * y.power(half).matrix())));
        let root_sum = psd_values(&sum_hermitian(roots))?;
        let mid = SingularValueList::from_unsorted(root_sum.values().iter().map(|&v| v * v).collect());
        let rhs = match variant {
            CommutingVariant::Product => singular_values(&(self.sum_a.matrix() * self.sum_b.matrix()))?,
            CommutingVariant::Symmetrized => SingularValueList::from_unsorted(self.core.eig().eigenvalues.clone()),
        };
        Ok(Sides {
            lhs,
            mid: Some(mid),
            rhs,
        })
    }

    fn sides(&mut self, chain: ChainId, params: &ChainParams) -> Result<Sides<T>> {
        let ChainParams { s, r, t, .. } = *params;
        match chain {
            ChainId::Main => Ok(Sides {
                lhs: self.mean_sum_power(s, 0.5, r)?,
                mid: Some(self.z_power(s * r / 2.0)?),
                rhs: self.t_rhs(params)?,
            }),
            ChainId::GeoZ => Ok(Sides {
                lhs: self.mean_sum_power(s, 0.5, 1.0)?,
                mid: None,
                rhs: self.z_power(s / 2.0)?,
            }),
            ChainId::TChain => Ok(Sides {
                lhs: self.mean_sum_power(s, t, r)?,
                mid: None,
                rhs: self.t_rhs(params)?,
            }),
            ChainId::CommutingProduct => self.commuting(CommutingVariant::Product),
            ChainId::CommutingSymmetrized => self.commuting(CommutingVariant::Symmetrized),
        }
    }
}

fn side_values<T: Real>(sides: &Sides<T>, norm: NormSpec, dim: usize) -> Result<(f64, Option<f64>, f64)> {
    let lhs = sides.lhs.norm(norm, dim)?.to_f64();
    let mid = match &sides.mid {
        Some(m) => Some(m.norm(norm, dim)?.to_f64()),
        None => None,
    };
    let rhs = sides.rhs.norm(norm, dim)?.to_f64();
    Ok((lhs, mid, rhs))
}

/// Evaluates chains on one instance, caching powers and means across
/// parameter points.
pub struct ChainEvaluator {
    ctx: Context<f64>,
    extended: Option<Context<DoubleDouble>>,
    cfg: SuiteConfig,
    base_condition: f64,
    input_condition: f64,
}

impl ChainEvaluator {
    pub fn new(inst: &InstanceSet<f64>, cfg: SuiteConfig) -> Result<Self> {
        cfg.validate()?;
        let ctx = Context::new(inst.clone())?;
        let input_condition = inst
            .a()
            .iter()
            .chain(inst.b())
            .map(|x| x.condition_number())
            .fold(1.0, f64::max);
        let base_condition = [&ctx.sum_a, &ctx.sum_b, &ctx.core]
            .iter()
            .map(|x| x.condition_number())
            .fold(input_condition, f64::max);
        Ok(Self {
            ctx,
            extended: None,
            cfg,
            base_condition,
            input_condition,
        })
    }

    pub fn instance(&self) -> &InstanceSet<f64> {
        &self.ctx.inst
    }

    /// Ambient dimension of the norms: `mn` when `Z` takes part, else `n`.
    pub fn ambient_dim(&self, chain: ChainId) -> usize {
        match chain {
            ChainId::Main | ChainId::GeoZ => self.ctx.inst.m() * self.ctx.inst.n(),
            _ => self.ctx.inst.n(),
        }
    }

    /// Largest condition number among the inputs, their `s`-th powers, the
    /// two sums and the reduced core.
    pub fn condition_max(&self, s: f64) -> f64 {
        self.base_condition.max(self.input_condition.powf(s))
    }

    /// Checks the chain hypotheses and returns the parameters as reported
    /// together with the status.
    fn admit(&self, chain: ChainId, params: ChainParams) -> Result<(ChainParams, Status)> {
        params.check_basic()?;
        match chain {
            ChainId::Main => {
                let ChainParams { s, r, p, .. } = params;
                if !(s >= 2.0 && r >= 1.0 && r * p >= 1.0) {
                    return Err(Error::HypothesisViolation(format!(
                        "main chain needs s >= 2, r >= 1, rp >= 1; got s={s}, r={r}, p={p}"
                    )));
                }
                Ok((ChainParams { t: 0.5, ..params }, Status::Proven))
            }
            ChainId::GeoZ => {
                if params.s < 1.0 {
                    return Err(Error::HypothesisViolation(format!(
                        "geo-z needs s >= 1, got {}",
                        params.s
                    )));
                }
                Ok((
                    ChainParams {
                        s: params.s,
                        r: 1.0,
                        p: 1.0,
                        t: 0.5,
                    },
                    Status::Proven,
                ))
            }
            ChainId::TChain => Ok((params, t_chain_status(&params))),
            ChainId::CommutingProduct | ChainId::CommutingSymmetrized => {
                if self.ctx.inst.kind() != InstanceKind::Commuting {
                    return Err(Error::NotCommuting("commuting chain on a generic instance".into()));
                }
                Ok((
                    ChainParams {
                        s: 1.0,
                        r: 1.0,
                        p: 1.0,
                        t: 0.5,
                    },
                    Status::Proven,
                ))
            }
        }
    }

    pub fn evaluate(&mut self, chain: ChainId, params: ChainParams, norms: &[NormSpec]) -> Result<Vec<ChainReport>> {
        let (params, status) = self.admit(chain, params)?;
        let dim = self.ambient_dim(chain);
        for norm in norms {
            norm.validate(dim)?;
        }
        let condition_max = match chain {
            ChainId::CommutingProduct | ChainId::CommutingSymmetrized => self.base_condition,
            _ => self.condition_max(params.s),
        };
        let gated = !(condition_max <= self.cfg.condition_cap);
        let sides = self.ctx.sides(chain, &params)?;
        let inst = &self.ctx.inst;
        let mut reports = Vec::with_capacity(norms.len());
        for &norm in norms {
            let (lhs, mid, rhs) = side_values(&sides, norm, dim)?;
            let margins = chain_margins(lhs, mid, rhs);
            let pass = self.cfg.passes(&margins, rhs);
            reports.push(ChainReport {
                chain_id: chain,
                instance_seed: inst.seed(),
                n: inst.n(),
                m: inst.m(),
                params,
                norm,
                lhs,
                mid,
                rhs,
                margins,
                pass,
                gated,
                status,
                condition_max,
                violation_candidate: !pass && !gated,
                recheck: None,
            });
        }
        if self.cfg.recheck && !gated && reports.iter().any(|r| !r.pass) {
            self.recheck(chain, &params, dim, &mut reports)?;
        }
        Ok(reports)
    }

    fn recheck(&mut self, chain: ChainId, params: &ChainParams, dim: usize, reports: &mut [ChainReport]) -> Result<()> {
        if self.extended.is_none() {
            self.extended = Some(Context::new(self.ctx.inst.cast::<DoubleDouble>()?)?);
        }
        let ext = self.extended.as_mut().expect("just built");
        let sides = ext.sides(chain, params)?;
        for rep in reports.iter_mut().filter(|r| !r.pass) {
            let (lhs, mid, rhs) = side_values(&sides, rep.norm, dim)?;
            let margins = chain_margins(lhs, mid, rhs);
            let pass = self.cfg.passes(&margins, rhs);
            rep.pass = pass;
            rep.violation_candidate = !pass;
            rep.recheck = Some(Recheck {
                lhs,
                mid,
                rhs,
                margins,
                pass,
            });
        }
        Ok(())
    }
}

fn single(inst: &InstanceSet<f64>, chain: ChainId, params: ChainParams, norm: NormSpec) -> Result<ChainReport> {
    let mut ev = ChainEvaluator::new(inst, SuiteConfig::default())?;
    Ok(ev.evaluate(chain, params, &[norm])?.remove(0))
}

/// `‖Σ (A_i^s ♯ B_i^s)^r‖ ≤ ‖Z^{sr/2}‖ ≤ ‖((ΣA)^{srp/4} (ΣB)^{srp/2} (ΣA)^{srp/4})^{1/p}‖`.
pub fn eval_main_chain(inst: &InstanceSet<f64>, params: ChainParams, norm: NormSpec) -> Result<ChainReport> {
    single(inst, ChainId::Main, params, norm)
}

/// `‖Σ A_i^s ♯ B_i^s‖ ≤ ‖Z^{s/2}‖` for `s ≥ 1`.
pub fn eval_geo_vs_z(inst: &InstanceSet<f64>, s: f64, norm: NormSpec) -> Result<ChainReport> {
    single(inst, ChainId::GeoZ, ChainParams::main(s, 1.0, 1.0)?, norm)
}

/// `‖Σ (A_i^s ♯_t B_i^s)^r‖ ≤ ‖((ΣA)^{(1−t)srp/2} (ΣB)^{tsrp} (ΣA)^{(1−t)srp/2})^{1/p}‖`.
pub fn eval_t_chain(inst: &InstanceSet<f64>, params: ChainParams, norm: NormSpec) -> Result<ChainReport> {
    single(inst, ChainId::TChain, params, norm)
}

/// `‖Σ A_i B_i‖ ≤ ‖(Σ A_i^{1/2} B_i^{1/2})^2‖ ≤` the chosen right side, for
/// commuting pairs.
pub fn eval_commuting_chain(inst: &InstanceSet<f64>, variant: CommutingVariant, norm: NormSpec) -> Result<ChainReport> {
    single(inst, variant.chain_id(), ChainParams::main(1.0, 1.0, 1.0)?, norm)
}
