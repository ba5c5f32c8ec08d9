//! Inequality chains and lemma checks evaluated on concrete instances.
//!
//! Every comparison is reported as margins `right − left`; a check passes
//! when each margin is at least `−tol_rel · max(1, rhs)`. Failing checks are
//! re-evaluated in double-double arithmetic before they are reported as
//! violation candidates.

mod chains;
mod lemmas;

pub use chains::{
    eval_commuting_chain, eval_geo_vs_z, eval_main_chain, eval_t_chain, t_chain_status, ChainEvaluator,
    CommutingVariant,
};
pub use lemmas::{eval_lemma, eval_lemma_norms, LemmaCase, LemmaId, LemmaReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::NormSpec;

/// Exponents shared by the chains: powers `s`, outer power `r`, Araki-type
/// exponent `p`, and mean weight `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub s: f64,
    pub r: f64,
    pub p: f64,
    pub t: f64,
}

impl ChainParams {
    /// Requires `s, r, p > 0` and `t ∈ [0, 1]`.
    pub fn new(s: f64, r: f64, p: f64, t: f64) -> Result<Self> {
        let params = Self { s, r, p, t };
        params.check_basic()?;
        Ok(params)
    }

    /// `t = 1/2`.
    pub fn main(s: f64, r: f64, p: f64) -> Result<Self> {
        Self::new(s, r, p, 0.5)
    }

    pub(crate) fn check_basic(&self) -> Result<()> {
        for (name, v) in [("s", self.s), ("r", self.r), ("p", self.p)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::HypothesisViolation(format!("{name} = {v} must be positive")));
            }
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::HypothesisViolation(format!("t = {} outside [0, 1]", self.t)));
        }
        Ok(())
    }

    pub fn sort_key(&self) -> [f64; 4] {
        [self.s, self.r, self.p, self.t]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainId {
    Main,
    GeoZ,
    TChain,
    CommutingProduct,
    CommutingSymmetrized,
}

impl ChainId {
    pub fn label(&self) -> &'static str {
        match self {
            ChainId::Main => "main",
            ChainId::GeoZ => "geo-z",
            ChainId::TChain => "t-chain",
            ChainId::CommutingProduct => "commuting-product",
            ChainId::CommutingSymmetrized => "commuting-symmetrized",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Proven,
    Conjectured,
}

/// Tolerance and gating policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub tol_rel: f64,
    /// Instances with any gated matrix above this condition number are
    /// excluded from statistics.
    pub condition_cap: f64,
    /// Re-evaluate failing checks in double-double arithmetic.
    pub recheck: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            tol_rel: 1e-8,
            condition_cap: 1e8,
            recheck: true,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel >= 0.0 && self.tol_rel.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol_rel = {}", self.tol_rel)));
        }
        if !(self.condition_cap > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "condition_cap = {} must exceed 1",
                self.condition_cap
            )));
        }
        Ok(())
    }

    /// `margin >= −tol · max(1, rhs)` for every margin.
    pub fn passes(&self, margins: &[f64], rhs: f64) -> bool {
        let floor = -self.tol_rel * rhs.max(1.0);
        margins.iter().all(|&m| m >= floor)
    }
}

/// Outcome of the extended-precision re-evaluation of a failing check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recheck {
    pub lhs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mid: Option<f64>,
    pub rhs: f64,
    pub margins: Vec<f64>,
    pub pass: bool,
}

/// One chain evaluated under one norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub chain_id: ChainId,
    pub instance_seed: u64,
    pub n: usize,
    pub m: usize,
    pub params: ChainParams,
    pub norm: NormSpec,
    pub lhs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mid: Option<f64>,
    pub rhs: f64,
    /// `[mid − lhs, rhs − mid]`, or `[rhs − lhs]` without a middle term.
    pub margins: Vec<f64>,
    pub pass: bool,
    pub gated: bool,
    pub status: Status,
    pub condition_max: f64,
    /// Failing check whose failure survived the extended-precision pass.
    pub violation_candidate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recheck: Option<Recheck>,
}

impl ChainReport {
    /// Smallest margin divided by `max(1, rhs)`.
    pub fn normalized_margin(&self) -> f64 {
        let m = self.margins.iter().copied().fold(f64::INFINITY, f64::min);
        m / self.rhs.max(1.0)
    }
}

/// Margins for a `lhs ≤ [mid ≤] rhs` comparison.
pub(crate) fn chain_margins(lhs: f64, mid: Option<f64>, rhs: f64) -> Vec<f64> {
    match mid {
        Some(mid) => vec![mid - lhs, rhs - mid],
        None => vec![rhs - lhs],
    }
}
