use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::generate::{generate_instance, generate_lemma_case, task_seed, SpectrumLaw};
use super::Execution;
use crate::blocks::InstanceKind;
use crate::error::{Error, Result};
use crate::norms::{NormSelector, NormSpec};
use crate::suite::{
    eval_lemma_norms, ChainEvaluator, ChainId, ChainParams, ChainReport, LemmaId, LemmaReport, Status, SuiteConfig,
};

/// What a sweep evaluates. `Commuting` covers both commuting variants and
/// `Lemmas` every lemma family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTarget {
    Main,
    GeoZ,
    TChain,
    Commuting,
    Lemmas,
}

impl SweepTarget {
    pub fn label(&self) -> &'static str {
        match self {
            SweepTarget::Main => "main",
            SweepTarget::GeoZ => "geo-z",
            SweepTarget::TChain => "t-chain",
            SweepTarget::Commuting => "commuting",
            SweepTarget::Lemmas => "lemmas",
        }
    }
}

impl std::str::FromStr for SweepTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(SweepTarget::Main),
            "geo-z" => Ok(SweepTarget::GeoZ),
            "t-chain" => Ok(SweepTarget::TChain),
            "commuting" => Ok(SweepTarget::Commuting),
            "lemmas" => Ok(SweepTarget::Lemmas),
            other => Err(Error::InvalidConfig(format!("unknown chain '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub t: Vec<f64>,
}

impl ParamGrid {
    fn is_empty(&self) -> bool {
        self.s.is_empty() || self.r.is_empty() || self.p.is_empty() || self.t.is_empty()
    }

    /// Points admissible for `target`, in grid order, without duplicates
    /// after the chain fixes its nominal exponents.
    fn points(&self, target: SweepTarget) -> Vec<ChainParams> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out: Vec<ChainParams> = Vec::new();
        let mut push = |p: ChainParams| {
            if !out.contains(&p) {
                out.push(p);
            }
        };
        for &s in &self.s {
            for &r in &self.r {
                for &p in &self.p {
                    for &t in &self.t {
                        let Ok(point) = ChainParams::new(s, r, p, t) else {
                            continue;
                        };
                        match target {
                            SweepTarget::Main if s >= 2.0 && r >= 1.0 && r * p >= 1.0 => {
                                push(ChainParams { t: 0.5, ..point })
                            }
                            SweepTarget::GeoZ if s >= 1.0 => push(ChainParams {
                                s,
                                r: 1.0,
                                p: 1.0,
                                t: 0.5,
                            }),
                            SweepTarget::TChain => push(point),
                            SweepTarget::Commuting => push(ChainParams {
                                s: 1.0,
                                r: 1.0,
                                p: 1.0,
                                t: 0.5,
                            }),
                            _ => {}
                        }
                    }
                }
            }
        }
        out
    }
}

fn default_tol() -> f64 {
    1e-8
}

fn default_cap() -> f64 {
    1e8
}

fn default_norms() -> Vec<NormSelector> {
    let mut v = vec![NormSelector::KyFanAll];
    v.extend([1.0, 2.0, f64::INFINITY].map(|p| NormSelector::Single(NormSpec::Schatten(p))));
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub instance_count: usize,
    pub base_seed: u64,
    #[serde(default = "generic")]
    pub generator: InstanceKind,
    #[serde(default)]
    pub spectrum_law: SpectrumLaw,
    pub param_grid: ParamGrid,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormSelector>,
    #[serde(default = "default_tol")]
    pub tol_rel: f64,
    #[serde(default = "default_cap")]
    pub condition_cap: f64,
    pub chains: Vec<SweepTarget>,
}

fn generic() -> InstanceKind {
    InstanceKind::Generic
}

pub(crate) fn nonempty_dims(values: &[usize], name: &str) -> Result<()> {
    if values.is_empty() || values.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "{name} must be a nonempty list of positive sizes"
        )));
    }
    Ok(())
}

pub(crate) fn max_of(values: &[usize]) -> usize {
    values.iter().copied().max().unwrap_or(0)
}

/// Rejects empty selections and norms that fit no ambient dimension up to
/// `max_dim`.
pub(crate) fn validate_norms(norms: &[NormSelector], max_dim: usize) -> Result<()> {
    if norms.is_empty() {
        return Err(Error::InvalidConfig("norms must not be empty".into()));
    }
    for sel in norms {
        if let NormSelector::Single(spec) = sel {
            spec.validate(max_dim)
                .map_err(|e| Error::InvalidConfig(format!("norm {spec}: {e}")))?;
        }
    }
    Ok(())
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        nonempty_dims(&self.n_values, "n_values")?;
        nonempty_dims(&self.m_values, "m_values")?;
        self.spectrum_law.validate()?;
        self.suite_config().validate()?;
        if self.chains.is_empty() {
            return Err(Error::InvalidConfig("chains must not be empty".into()));
        }
        validate_norms(&self.norms, max_of(&self.n_values) * max_of(&self.m_values))?;
        if self.chains.contains(&SweepTarget::Commuting) && self.generator != InstanceKind::Commuting {
            return Err(Error::InvalidConfig(
                "the commuting chains need generator = commuting".into(),
            ));
        }
        Ok(())
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            tol_rel: self.tol_rel,
            condition_cap: self.condition_cap,
            recheck: true,
        }
    }

    /// Shape of instance `j`: `n` cycles fastest.
    pub fn shape(&self, j: usize) -> (usize, usize) {
        let ln = self.n_values.len();
        (self.n_values[j % ln], self.m_values[(j / ln) % self.m_values.len()])
    }
}

/// Expands selectors for an ambient dimension, sorted and deduplicated.
pub(crate) fn expand_norms(selectors: &[NormSelector], dim: usize) -> Vec<NormSpec> {
    let mut out: Vec<NormSpec> = selectors.iter().flat_map(|s| s.expand(dim)).collect();
    out.sort_by(cmp_norm);
    out.dedup();
    out
}

fn cmp_norm(a: &NormSpec, b: &NormSpec) -> Ordering {
    let (ka, va) = a.sort_key();
    let (kb, vb) = b.sort_key();
    ka.cmp(&kb).then(va.total_cmp(&vb))
}

fn cmp_params(a: &ChainParams, b: &ChainParams) -> Ordering {
    a.sort_key()
        .iter()
        .zip(b.sort_key().iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// An evaluation that raised an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub target: String,
    pub instance_seed: u64,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ChainParams>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Chain(ChainReport),
    Lemma(LemmaReport),
    Failure(FailureRecord),
}

impl Record {
    fn rank(&self) -> u8 {
        match self {
            Record::Chain(_) => 0,
            Record::Lemma(_) => 1,
            Record::Failure(_) => 2,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Record::Chain(a), Record::Chain(b)) => a
                .chain_id
                .cmp(&b.chain_id)
                .then(a.instance_seed.cmp(&b.instance_seed))
                .then_with(|| cmp_params(&a.params, &b.params))
                .then_with(|| cmp_norm(&a.norm, &b.norm)),
            (Record::Lemma(a), Record::Lemma(b)) => a
                .lemma_id
                .cmp(&b.lemma_id)
                .then(a.instance_seed.cmp(&b.instance_seed))
                .then_with(|| cmp_norm(&a.norm, &b.norm)),
            (Record::Failure(a), Record::Failure(b)) => a
                .target
                .cmp(&b.target)
                .then(a.instance_seed.cmp(&b.instance_seed))
                .then_with(|| match (&a.params, &b.params) {
                    (Some(x), Some(y)) => cmp_params(x, y),
                    (x, y) => x.is_some().cmp(&y.is_some()),
                }),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

/// Aggregate over one (target, norm class) pair. Gated records count only
/// towards `gated`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub target: String,
    pub norm_class: String,
    pub records: usize,
    pub pass: usize,
    pub fail: usize,
    pub gated: usize,
    pub candidates: usize,
    /// Smallest `margin / max(1, rhs)` among non-gated records.
    pub min_margin: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub records: usize,
    pub pass: usize,
    pub fail: usize,
    pub gated: usize,
    /// Violation candidates in any regime.
    pub candidates: usize,
    /// Violation candidates where the statement is proven.
    pub proven_candidates: usize,
    pub failures: usize,
}

impl Summary {
    pub fn from_records(records: &[Record]) -> Self {
        let mut rows: BTreeMap<(String, String), SummaryRow> = BTreeMap::new();
        let mut summary = Summary::default();
        for rec in records {
            let (target, norm, gated, pass, candidate, proven, margin) = match rec {
                Record::Chain(c) => (
                    c.chain_id.label(),
                    c.norm,
                    c.gated,
                    c.pass,
                    c.violation_candidate,
                    c.status == Status::Proven,
                    c.normalized_margin(),
                ),
                Record::Lemma(l) => (
                    l.lemma_id.label(),
                    l.norm,
                    false,
                    l.pass,
                    l.violation_candidate,
                    true,
                    l.normalized_margin(),
                ),
                Record::Failure(_) => {
                    summary.failures += 1;
                    continue;
                }
            };
            let row = rows
                .entry((target.to_string(), norm.class().to_string()))
                .or_insert_with(|| SummaryRow {
                    target: target.to_string(),
                    norm_class: norm.class().to_string(),
                    ..SummaryRow::default()
                });
            row.records += 1;
            summary.records += 1;
            if gated {
                row.gated += 1;
                summary.gated += 1;
                continue;
            }
            row.min_margin = Some(row.min_margin.map_or(margin, |m| m.min(margin)));
            if pass {
                row.pass += 1;
                summary.pass += 1;
            } else {
                row.fail += 1;
                summary.fail += 1;
            }
            if candidate {
                row.candidates += 1;
                summary.candidates += 1;
                if proven {
                    summary.proven_candidates += 1;
                }
            }
        }
        summary.rows = rows.into_values().collect();
        summary
    }
}

/// Sorted records with their summary.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportSet {
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl ReportSet {
    pub fn from_records(mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| a.cmp_key(b));
        let summary = Summary::from_records(&records);
        Self { records, summary }
    }
}

fn chain_task(cfg: &SweepConfig, points: &BTreeMap<SweepTarget, Vec<ChainParams>>, j: usize) -> Vec<Record> {
    let (n, m) = cfg.shape(j);
    let seed = task_seed(cfg.base_seed, j as u64);
    let fail = |target: &str, params: Option<ChainParams>, e: Error| {
        Record::Failure(FailureRecord {
            target: target.to_string(),
            instance_seed: seed,
            n,
            m,
            params,
            message: e.to_string(),
        })
    };
    let mut out = Vec::new();
    let mut evaluator = None;
    for (&target, pts) in points {
        if target == SweepTarget::Lemmas || pts.is_empty() {
            continue;
        }
        if evaluator.is_none() {
            let built = generate_instance(cfg.generator, n, m, seed, &cfg.spectrum_law)
                .and_then(|inst| ChainEvaluator::new(&inst, cfg.suite_config()));
            match built {
                Ok(ev) => evaluator = Some(ev),
                Err(e) => {
                    out.push(fail("instance", None, e));
                    return out;
                }
            }
        }
        let ev = evaluator.as_mut().expect("built above");
        let chains: &[ChainId] = match target {
            SweepTarget::Main => &[ChainId::Main],
            SweepTarget::GeoZ => &[ChainId::GeoZ],
            SweepTarget::TChain => &[ChainId::TChain],
            SweepTarget::Commuting => &[ChainId::CommutingProduct, ChainId::CommutingSymmetrized],
            SweepTarget::Lemmas => &[],
        };
        for &chain in chains {
            let norms = expand_norms(&cfg.norms, ev.ambient_dim(chain));
            for &params in pts {
                match ev.evaluate(chain, params, &norms) {
                    Ok(reports) => out.extend(reports.into_iter().map(Record::Chain)),
                    Err(e) => out.push(fail(chain.label(), Some(params), e)),
                }
            }
        }
    }
    out
}

fn lemma_task(cfg: &SweepConfig, j: usize) -> Vec<Record> {
    let (n, m) = cfg.shape(j);
    let base = task_seed(cfg.base_seed, j as u64);
    let mut out = Vec::new();
    for (idx, id) in LemmaId::ALL.iter().enumerate() {
        let seed = task_seed(base, idx as u64);
        let result = generate_lemma_case(*id, n, m, seed, &cfg.spectrum_law).and_then(|case| {
            let norms = expand_norms(&cfg.norms, case.ambient_dim());
            eval_lemma_norms(&case, &norms, &cfg.suite_config(), seed)
        });
        match result {
            Ok(reports) => out.extend(reports.into_iter().map(Record::Lemma)),
            Err(e) => out.push(Record::Failure(FailureRecord {
                target: id.label().to_string(),
                instance_seed: seed,
                n,
                m,
                params: None,
                message: e.to_string(),
            })),
        }
    }
    out
}

/// Evaluates every configured target on `instance_count` seeded instances.
pub fn run_sweep(cfg: &SweepConfig) -> Result<ReportSet> {
    run_sweep_with(cfg, Execution::Parallel)
}

pub fn run_sweep_with(cfg: &SweepConfig, exec: Execution) -> Result<ReportSet> {
    cfg.validate()?;
    let points: BTreeMap<SweepTarget, Vec<ChainParams>> =
        cfg.chains.iter().map(|&t| (t, cfg.param_grid.points(t))).collect();
    let chains_active = points.iter().any(|(t, p)| *t != SweepTarget::Lemmas && !p.is_empty());
    let lemmas = cfg.chains.contains(&SweepTarget::Lemmas);
    let tasks: Vec<usize> = (0..cfg.instance_count).collect();
    let records: Vec<Record> = exec
        .map(tasks, |j| {
            let mut recs = if chains_active {
                chain_task(cfg, &points, j)
            } else {
                Vec::new()
            };
            if lemmas {
                recs.extend(lemma_task(cfg, j));
            }
            recs
        })
        .into_iter()
        .flatten()
        .collect();
    Ok(ReportSet::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SweepConfig {
        SweepConfig {
            n_values: vec![1, 2, 3],
            m_values: vec![1, 2],
            instance_count: 6,
            base_seed: 11,
            generator: InstanceKind::Generic,
            spectrum_law: SpectrumLaw::default(),
            param_grid: ParamGrid {
                s: vec![2.0, 3.0],
                r: vec![1.0, 2.0],
                p: vec![1.0],
                t: vec![0.5],
            },
            norms: default_norms(),
            tol_rel: 1e-8,
            condition_cap: 1e8,
            chains: vec![SweepTarget::Main],
        }
    }

    #[test]
    fn empty_grid_gives_empty_set() {
        let mut cfg = config();
        cfg.param_grid.p.clear();
        let rs = run_sweep(&cfg).unwrap();
        assert!(rs.records.is_empty());
        assert_eq!(rs.summary, Summary::default());
    }

    #[test]
    fn main_sweep_passes_and_is_sorted() {
        let rs = run_sweep(&config()).unwrap();
        assert!(!rs.records.is_empty());
        assert_eq!(rs.summary.fail, 0);
        assert_eq!(rs.summary.failures, 0);
        let mut sorted = rs.records.clone();
        sorted.sort_by(|a, b| a.cmp_key(b));
        assert_eq!(sorted, rs.records);
    }

    #[test]
    fn serial_matches_parallel() {
        let mut cfg = config();
        cfg.chains.push(SweepTarget::Lemmas);
        let a = run_sweep_with(&cfg, Execution::Serial).unwrap();
        let b = run_sweep_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn commuting_requires_generator() {
        let mut cfg = config();
        cfg.chains = vec![SweepTarget::Commuting];
        assert!(matches!(run_sweep(&cfg), Err(Error::InvalidConfig(_))));
        cfg.generator = InstanceKind::Commuting;
        let rs = run_sweep(&cfg).unwrap();
        assert!(rs.summary.records > 0 && rs.summary.fail == 0);
    }
}
