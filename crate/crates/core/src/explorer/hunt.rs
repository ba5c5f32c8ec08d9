use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::generate::{
    gaussian_matrix, generate_instance, orthonormalize, rng_for, task_seed, with_spectrum, SpectrumLaw,
};
use super::sweep::{expand_norms, max_of, nonempty_dims, validate_norms};
use super::Execution;
use crate::blocks::{InstanceKind, InstanceRecord, InstanceSet};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SpdMatrix};
use crate::norms::{NormSelector, NormSpec};
use crate::suite::{t_chain_status, ChainEvaluator, ChainId, ChainParams, Recheck, Status, SuiteConfig};

const REFINE_SALT: u64 = 0x5EED_F00D_0000_0001;

fn default_r_range() -> [f64; 2] {
    [1.0, 2.0]
}

fn default_p_range() -> [f64; 2] {
    [0.5, 2.0]
}

fn default_scale() -> f64 {
    0.05
}

/// Random search over the t-chain. `p` is drawn from `p_range` intersected
/// with `p ≥ 1/r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub base_seed: u64,
    #[serde(default)]
    pub spectrum_law: SpectrumLaw,
    pub norms: Vec<NormSelector>,
    pub tol_rel: f64,
    pub condition_cap: f64,
    pub s_range: [f64; 2],
    pub t_range: [f64; 2],
    #[serde(default = "default_r_range")]
    pub r_range: [f64; 2],
    #[serde(default = "default_p_range")]
    pub p_range: [f64; 2],
    pub samples: usize,
    pub refine_steps: usize,
    #[serde(default = "default_scale")]
    pub refine_scale: f64,
}

impl SearchConfig {
    /// Instances with `n ≤ n_max`, `m ≤ m_max`, all Ky Fan norms and
    /// Schatten 1, 2, ∞.
    pub fn new(
        n_max: usize,
        m_max: usize,
        s_range: [f64; 2],
        t_range: [f64; 2],
        samples: usize,
        base_seed: u64,
    ) -> Self {
        let mut norms = vec![NormSelector::KyFanAll];
        norms.extend([1.0, 2.0, f64::INFINITY].map(|p| NormSelector::Single(NormSpec::Schatten(p))));
        Self {
            n_values: (1..=n_max).collect(),
            m_values: (1..=m_max).collect(),
            base_seed,
            spectrum_law: SpectrumLaw::default(),
            norms,
            tol_rel: 1e-8,
            condition_cap: 1e8,
            s_range,
            t_range,
            r_range: default_r_range(),
            p_range: default_p_range(),
            samples,
            refine_steps: 0,
            refine_scale: default_scale(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        nonempty_dims(&self.n_values, "n_values")?;
        nonempty_dims(&self.m_values, "m_values")?;
        self.spectrum_law.validate()?;
        self.suite_config().validate()?;
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        validate_norms(&self.norms, max_of(&self.n_values))?;
        let interval = |name: &str, [lo, hi]: [f64; 2], min: f64, max: f64| {
            if lo >= min && lo <= hi && hi <= max && hi.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{name} = [{lo}, {hi}] must lie in [{min}, {max}]"
                )))
            }
        };
        interval("s_range", self.s_range, f64::MIN_POSITIVE, f64::MAX)?;
        interval("t_range", self.t_range, 0.0, 1.0)?;
        interval("r_range", self.r_range, f64::MIN_POSITIVE, f64::MAX)?;
        interval("p_range", self.p_range, f64::MIN_POSITIVE, f64::MAX)?;
        if !(self.refine_scale >= 0.0 && self.refine_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("refine_scale = {}", self.refine_scale)));
        }
        Ok(())
    }

    fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            tol_rel: self.tol_rel,
            condition_cap: self.condition_cap,
            recheck: false,
        }
    }
}

/// The worst point found, stored with explicit matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchArgmin {
    pub sample_index: usize,
    pub instance: InstanceRecord,
    pub params: ChainParams,
    pub norm: NormSpec,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Smallest `margin / max(1, rhs)` over non-gated evaluations; `None`
    /// when every sample was gated or failed.
    pub min_margin: Option<f64>,
    pub argmin: Option<SearchArgmin>,
    pub samples_evaluated: usize,
    pub gated_count: usize,
    pub failure_count: usize,
    pub refine_accepted: usize,
    pub base_seed: u64,
    /// The minimum stays below `−tol_rel` after the extended-precision pass.
    pub violation_candidate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recheck: Option<Recheck>,
    #[serde(skip)]
    pub wall_seconds: f64,
}

impl SearchResult {
    /// Re-evaluates the stored argmin; returns its normalized margin.
    pub fn reevaluate(&self, cfg: &SearchConfig) -> Result<Option<f64>> {
        let Some(arg) = &self.argmin else { return Ok(None) };
        let inst = InstanceSet::try_from(&arg.instance)?;
        let mut ev = ChainEvaluator::new(&inst, cfg.suite_config())?;
        let rep = ev.evaluate(ChainId::TChain, arg.params, &[arg.norm])?.remove(0);
        Ok(Some(rep.normalized_margin()))
    }
}

enum Outcome {
    Margin(f64, NormSpec),
    Gated,
    Failed,
}

fn evaluate(inst: &InstanceSet<f64>, params: ChainParams, cfg: &SearchConfig) -> Outcome {
    let run = || -> Result<Outcome> {
        let mut ev = ChainEvaluator::new(inst, cfg.suite_config())?;
        let norms = expand_norms(&cfg.norms, ev.ambient_dim(ChainId::TChain));
        let reports = ev.evaluate(ChainId::TChain, params, &norms)?;
        if reports[0].gated {
            return Ok(Outcome::Gated);
        }
        let worst = reports
            .iter()
            .map(|r| (r.normalized_margin(), r.norm))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("at least one norm");
        Ok(Outcome::Margin(worst.0, worst.1))
    };
    run().unwrap_or(Outcome::Failed)
}

fn draw(rng: &mut impl Rng, [lo, hi]: [f64; 2]) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn sample_point(cfg: &SearchConfig, i: usize) -> Result<(InstanceSet<f64>, ChainParams)> {
    let seed = task_seed(cfg.base_seed, i as u64);
    let mut rng = rng_for(seed);
    let n = cfg.n_values[rng.random_range(0..cfg.n_values.len())];
    let m = cfg.m_values[rng.random_range(0..cfg.m_values.len())];
    let s = draw(&mut rng, cfg.s_range);
    let t = draw(&mut rng, cfg.t_range);
    let r = draw(&mut rng, cfg.r_range);
    let p_lo = cfg.p_range[0].max(1.0 / r);
    let p = if p_lo >= cfg.p_range[1] {
        p_lo
    } else {
        draw(&mut rng, [p_lo, cfg.p_range[1]])
    };
    let inst = generate_instance(InstanceKind::Generic, n, m, seed, &cfg.spectrum_law)?;
    Ok((inst, ChainParams::new(s, r, p, t)?))
}

/// Multiplicative eigenvalue noise and a near-identity rotation of the
/// eigenbasis of every matrix.
fn perturb(inst: &InstanceSet<f64>, scale: f64, rng: &mut impl Rng) -> Result<InstanceSet<f64>> {
    let n = inst.n();
    let mut jiggle = |x: &SpdMatrix<f64>| -> Result<SpdMatrix<f64>> {
        let eig = x.eig();
        let spectrum: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| l * (scale * rng.sample::<f64, _>(StandardNormal)).exp())
            .collect();
        let g = gaussian_matrix(n, n, rng).scale(scale);
        let rotation = orthonormalize(&(&ComplexMatrix::identity(n) + &g));
        with_spectrum(&(&eig.vectors * &rotation), &spectrum)
    };
    let a = inst.a().iter().map(&mut jiggle).collect::<Result<Vec<_>>>()?;
    let b = inst.b().iter().map(&mut jiggle).collect::<Result<Vec<_>>>()?;
    InstanceSet::new(InstanceKind::Generic, inst.seed(), a, b)
}

/// Samples the t-chain and refines the worst sample by local descent.
pub fn hunt(cfg: &SearchConfig) -> Result<SearchResult> {
    hunt_with(cfg, Execution::Parallel)
}

pub fn hunt_with(cfg: &SearchConfig, exec: Execution) -> Result<SearchResult> {
    cfg.validate()?;
    let started = Instant::now();
    let outcomes = exec.map((0..cfg.samples).collect(), |i| match sample_point(cfg, i) {
        Ok((inst, params)) => evaluate(&inst, params, cfg),
        Err(_) => Outcome::Failed,
    });
    let mut gated_count = 0;
    let mut failure_count = 0;
    let mut best: Option<(f64, NormSpec, usize)> = None;
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Outcome::Margin(m, norm) => {
                if best.is_none_or(|(b, _, _)| m < b) {
                    best = Some((m, norm, i));
                }
            }
            Outcome::Gated => gated_count += 1,
            Outcome::Failed => failure_count += 1,
        }
    }
    let mut result = SearchResult {
        min_margin: None,
        argmin: None,
        samples_evaluated: cfg.samples,
        gated_count,
        failure_count,
        refine_accepted: 0,
        base_seed: cfg.base_seed,
        violation_candidate: false,
        recheck: None,
        wall_seconds: 0.0,
    };
    if let Some((mut margin, mut norm, index)) = best {
        let (mut inst, params) = sample_point(cfg, index)?;
        let mut rng = rng_for(task_seed(cfg.base_seed ^ REFINE_SALT, index as u64));
        for _ in 0..cfg.refine_steps {
            let Ok(candidate) = perturb(&inst, cfg.refine_scale, &mut rng) else {
                continue;
            };
            if let Outcome::Margin(m, nm) = evaluate(&candidate, params, cfg) {
                if m < margin {
                    margin = m;
                    norm = nm;
                    inst = candidate;
                    result.refine_accepted += 1;
                }
            }
        }
        if margin < -cfg.tol_rel {
            let mut ev = ChainEvaluator::new(
                &inst,
                SuiteConfig {
                    recheck: true,
                    ..cfg.suite_config()
                },
            )?;
            let rep = ev.evaluate(ChainId::TChain, params, &[norm])?.remove(0);
            result.violation_candidate = rep.violation_candidate;
            result.recheck = rep.recheck;
        }
        result.min_margin = Some(margin);
        result.argmin = Some(SearchArgmin {
            sample_index: index,
            instance: InstanceRecord::from(&inst),
            params,
            norm,
            status: t_chain_status(&params),
        });
    }
    result.wall_seconds = started.elapsed().as_secs_f64();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_reproduces() {
        let cfg = SearchConfig::new(3, 2, [1.2, 1.8], [0.5, 0.5], 1, 3);
        let res = hunt(&cfg).unwrap();
        let again = res.reevaluate(&cfg).unwrap().unwrap();
        assert_eq!(again, res.min_margin.unwrap());
    }

    #[test]
    fn refinement_is_deterministic() {
        let mut cfg = SearchConfig::new(3, 2, [1.2, 1.8], [0.3, 0.7], 20, 5);
        cfg.refine_steps = 10;
        let a = hunt_with(&cfg, Execution::Serial).unwrap();
        let b = hunt_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!((a.reevaluate(&cfg).unwrap().unwrap() - a.min_margin.unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut cfg = SearchConfig::new(2, 2, [1.0, 2.0], [0.5, 0.5], 1, 0);
        cfg.t_range = [0.5, 1.5];
        assert!(hunt(&cfg).is_err());
        cfg.t_range = [0.5, 0.5];
        cfg.samples = 0;
        assert!(hunt(&cfg).is_err());
    }
}
