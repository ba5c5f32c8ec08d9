//! Unitarily invariant norms evaluated from singular values.
//!
//! A norm on `M_n` is applied to a smaller matrix through `A ⊕ 0`, so every
//! evaluation takes an ambient dimension: Ky Fan indices may run up to it and
//! missing singular values count as zeros.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;

/// One unitarily invariant norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormRepr", into = "NormRepr")]
pub enum NormSpec {
    /// Sum of the `k` largest singular values.
    KyFan(usize),
    /// `(Σ σ_i^p)^{1/p}` for `p >= 1`; `f64::INFINITY` gives the operator norm.
    Schatten(f64),
    Trace,
    Operator,
    Frobenius,
}

impl NormSpec {
    /// Rejects `k = 0`, `k > dim` and Schatten exponents below one.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            NormSpec::KyFan(k) if k == 0 || k > dim => {
                Err(Error::InvalidSpec(format!("Ky Fan index {k} outside 1..={dim}")))
            }
            NormSpec::Schatten(p) if p.is_nan() || p < 1.0 => {
                Err(Error::InvalidSpec(format!("Schatten exponent {p} is below 1")))
            }
            _ => Ok(()),
        }
    }

    /// Family label used to group summaries.
    pub fn class(&self) -> &'static str {
        match self {
            NormSpec::KyFan(_) => "kyfan",
            NormSpec::Schatten(_) => "schatten",
            NormSpec::Trace => "trace",
            NormSpec::Operator => "operator",
            NormSpec::Frobenius => "frobenius",
        }
    }

    /// Ordering key for deterministic report sorting.
    pub fn sort_key(&self) -> (u8, f64) {
        match *self {
            NormSpec::KyFan(k) => (0, k as f64),
            NormSpec::Schatten(p) => (1, p),
            NormSpec::Trace => (2, 0.0),
            NormSpec::Operator => (3, 0.0),
            NormSpec::Frobenius => (4, 0.0),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NormSpec::KyFan(k) => write!(f, "kyfan:{k}"),
            NormSpec::Schatten(p) if p.is_infinite() => write!(f, "schatten:inf"),
            NormSpec::Schatten(p) => write!(f, "schatten:{p}"),
            NormSpec::Trace => write!(f, "trace"),
            NormSpec::Operator => write!(f, "operator"),
            NormSpec::Frobenius => write!(f, "frobenius"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    /// Parses `kyfan:K`, `schatten:P`, `schatten:inf`, `trace`, `operator`,
    /// `frobenius`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidSpec(format!("cannot parse norm '{s}'"));
        match lower.split_once(':') {
            Some(("kyfan", k)) => k.parse().map(NormSpec::KyFan).map_err(|_| bad()),
            Some(("schatten", "inf")) => Ok(NormSpec::Schatten(f64::INFINITY)),
            Some(("schatten", p)) => {
                let p: f64 = p.parse().map_err(|_| bad())?;
                let spec = NormSpec::Schatten(p);
                spec.validate(usize::MAX)?;
                Ok(spec)
            }
            None if lower == "trace" => Ok(NormSpec::Trace),
            None if lower == "operator" => Ok(NormSpec::Operator),
            None if lower == "frobenius" => Ok(NormSpec::Frobenius),
            _ => Err(bad()),
        }
    }
}

/// Norm selection that may request the whole Ky Fan family, which is only
/// resolved once the ambient dimension is known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormSelector {
    KyFanAll,
    Single(NormSpec),
}

impl NormSelector {
    pub fn expand(&self, dim: usize) -> Vec<NormSpec> {
        match *self {
            NormSelector::KyFanAll => (1..=dim).map(NormSpec::KyFan).collect(),
            NormSelector::Single(spec) => vec![spec],
        }
    }

    /// Parses a comma-separated list such as `kyfan:all,schatten:2`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',')
            .filter(|item| !item.trim().is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for NormSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSelector::KyFanAll => f.write_str("kyfan:all"),
            NormSelector::Single(spec) => spec.fmt(f),
        }
    }
}

impl FromStr for NormSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("kyfan:all") {
            Ok(NormSelector::KyFanAll)
        } else {
            s.parse().map(NormSelector::Single)
        }
    }
}

impl TryFrom<String> for NormSelector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormSelector> for String {
    fn from(sel: NormSelector) -> Self {
        sel.to_string()
    }
}

#[derive(Serialize, Deserialize)]
struct NormRepr {
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<PValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PValue {
    Finite(f64),
    Named(String),
}

impl From<NormSpec> for NormRepr {
    fn from(spec: NormSpec) -> Self {
        let (k, p) = match spec {
            NormSpec::KyFan(k) => (Some(k), None),
            NormSpec::Schatten(p) if p.is_infinite() => (None, Some(PValue::Named("inf".into()))),
            NormSpec::Schatten(p) => (None, Some(PValue::Finite(p))),
            _ => (None, None),
        };
        NormRepr {
            variant: spec.class().to_string(),
            k,
            p,
        }
    }
}

impl TryFrom<NormRepr> for NormSpec {
    type Error = Error;

    fn try_from(r: NormRepr) -> Result<Self> {
        let missing = |what: &str| Error::InvalidSpec(format!("norm '{}' needs field {what}", r.variant));
        match r.variant.as_str() {
            "kyfan" => Ok(NormSpec::KyFan(r.k.ok_or_else(|| missing("k"))?)),
            "schatten" => match r.p.as_ref().ok_or_else(|| missing("p"))? {
                PValue::Finite(p) => Ok(NormSpec::Schatten(*p)),
                PValue::Named(name) if name == "inf" => Ok(NormSpec::Schatten(f64::INFINITY)),
                PValue::Named(name) => Err(Error::InvalidSpec(format!("Schatten exponent '{name}'"))),
            },
            "trace" => Ok(NormSpec::Trace),
            "operator" => Ok(NormSpec::Operator),
            "frobenius" => Ok(NormSpec::Frobenius),
            other => Err(Error::InvalidSpec(format!("unknown norm variant '{other}'"))),
        }
    }
}

/// Nonnegative singular values in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularValueList<T: Real> {
    values: Vec<T>,
}

impl<T: Real> SingularValueList<T> {
    /// Sorts descending and clamps rounding negatives to zero.
    pub fn from_unsorted(mut values: Vec<T>) -> Self {
        for v in values.iter_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    /// Sum of the `k` largest values; zeros beyond the stored length.
    pub fn ky_fan(&self, k: usize) -> T {
        self.values.iter().take(k).copied().sum()
    }

    /// All Ky Fan sums `K_1..K_dim`.
    pub fn ky_fan_prefix(&self, dim: usize) -> Vec<T> {
        let mut acc = T::zero();
        (0..dim)
            .map(|i| {
                if let Some(&v) = self.values.get(i) {
                    acc += v;
                }
                acc
            })
            .collect()
    }

    pub fn schatten(&self, p: f64) -> T {
        let smax = self.largest();
        if p.is_infinite() || smax.is_zero() {
            return smax;
        }
        let pt = T::from_f64(p);
        let sum: T = self
            .values
            .iter()
            .filter(|v| !v.is_zero())
            .map(|&v| (v / smax).powf(pt))
            .sum();
        smax * sum.powf(T::one() / pt)
    }

    /// Evaluates `spec` with Ky Fan indices checked against `dim`.
    pub fn norm(&self, spec: NormSpec, dim: usize) -> Result<T> {
        spec.validate(dim)?;
        Ok(match spec {
            NormSpec::KyFan(k) => self.ky_fan(k),
            NormSpec::Schatten(p) => self.schatten(p),
            NormSpec::Trace => self.ky_fan(self.len()),
            NormSpec::Operator => self.largest(),
            NormSpec::Frobenius => self.schatten(2.0),
        })
    }
}

/// Singular values of a general matrix, read off the Hermitian embedding
/// `[[0, M], [M*, 0]]` whose spectrum is `±σ_i` plus zeros.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Result<SingularValueList<T>> {
    let (r, c) = (m.rows(), m.cols());
    let size = r + c;
    let mut embed = ComplexMatrix::zeros(size, size);
    for i in 0..r {
        for j in 0..c {
            embed[(i, r + j)] = m[(i, j)];
            embed[(r + j, i)] = m[(i, j)].conj();
        }
    }
    let eig = hermitian_eig(&HermitianMatrix::symmetrize(&embed))?;
    let count = r.min(c);
    Ok(SingularValueList::from_unsorted(eig.eigenvalues[..count].to_vec()))
}

/// Singular values of a Hermitian matrix: `|λ_i|` sorted.
pub fn hermitian_singular_values<T: Real>(h: &HermitianMatrix<T>) -> Result<SingularValueList<T>> {
    let eig = hermitian_eig(h)?;
    Ok(SingularValueList::from_unsorted(
        eig.eigenvalues.iter().map(|l| l.abs()).collect(),
    ))
}

/// `‖M‖` with the ambient dimension taken as `min(rows, cols)`.
pub fn norm_eval<T: Real>(m: &ComplexMatrix<T>, spec: NormSpec) -> Result<T> {
    singular_values(m)?.norm(spec, m.rows().min(m.cols()))
}

/// Outcome of comparing two matrices across the whole Ky Fan family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub dominated: bool,
    /// 1-based index of the tightest Ky Fan norm.
    pub worst_k: usize,
    /// `min_k (K_k(Y) - K_k(X))`.
    pub worst_margin: f64,
}

/// Fan dominance of singular value lists padded to `dim`.
pub fn ky_fan_dominance_values<T: Real>(
    x: &SingularValueList<T>,
    y: &SingularValueList<T>,
    dim: usize,
    tol: T,
) -> DominanceReport {
    let kx = x.ky_fan_prefix(dim);
    let ky = y.ky_fan_prefix(dim);
    let scale = T::one().max(ky.last().copied().unwrap_or_else(T::zero));
    let mut worst_k = 1;
    let mut worst = ky[0] - kx[0];
    for k in 1..dim {
        let margin = ky[k] - kx[k];
        if margin < worst {
            worst = margin;
            worst_k = k + 1;
        }
    }
    DominanceReport {
        dominated: worst >= -(tol * scale),
        worst_k,
        worst_margin: worst.to_f64(),
    }
}

/// True iff `K_k(X) <= K_k(Y) + tol · max(1, K_n(Y))` for every `k`.
pub fn ky_fan_dominance<T: Real>(x: &ComplexMatrix<T>, y: &ComplexMatrix<T>, tol: T) -> Result<DominanceReport> {
    let n = x.require_square()?;
    let ny = y.require_square()?;
    if n != ny {
        return Err(Error::DimensionMismatch { left: n, right: ny });
    }
    Ok(ky_fan_dominance_values(
        &singular_values(x)?,
        &singular_values(y)?,
        n,
        tol,
    ))
}

/// `K_1..K_dim` followed by the Schatten norms listed in `schatten`.
pub fn standard_norms(dim: usize, schatten: &[f64]) -> Vec<NormSpec> {
    (1..=dim)
        .map(NormSpec::KyFan)
        .chain(schatten.iter().map(|&p| NormSpec::Schatten(p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Complex;

    fn diag(d: &[f64]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_real_diagonal(d)
    }

    #[test]
    fn singular_value_examples() {
        let nil = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        let sv = singular_values(&nil).unwrap();
        assert!((sv.values()[0] - 2.0).abs() < 1e-15 && sv.values()[1].abs() < 1e-15);
        let sv = singular_values(&diag(&[-3.0, 1.0])).unwrap();
        assert_eq!(sv.values(), &[3.0, 1.0]);
        let u = ComplexMatrix::new(
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
        for v in singular_values(&u).unwrap().values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rectangular_singular_values() {
        let m = ComplexMatrix::from_real(1, 2, &[3.0, 4.0]).unwrap();
        let sv = singular_values(&m).unwrap();
        assert_eq!(sv.len(), 1);
        assert!((sv.values()[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let d = diag(&[3.0, 1.0, 2.0]);
        assert!((norm_eval(&d, NormSpec::KyFan(2)).unwrap() - 5.0).abs() < 1e-14);
        assert!((norm_eval(&diag(&[3.0, 4.0]), NormSpec::Schatten(2.0)).unwrap() - 5.0).abs() < 1e-14);
        assert!((norm_eval(&d, NormSpec::Operator).unwrap() - 3.0).abs() < 1e-14);
        assert!((norm_eval(&d, NormSpec::Trace).unwrap() - 6.0).abs() < 1e-14);
        assert!((norm_eval(&d, NormSpec::Schatten(f64::INFINITY)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_specs() {
        let d = diag(&[1.0, 2.0]);
        assert!(matches!(norm_eval(&d, NormSpec::KyFan(3)), Err(Error::InvalidSpec(_))));
        assert!(matches!(norm_eval(&d, NormSpec::KyFan(0)), Err(Error::InvalidSpec(_))));
        assert!(matches!(
            norm_eval(&d, NormSpec::Schatten(0.5)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn dominance_examples() {
        let r = ky_fan_dominance(&diag(&[1.0, 1.0]), &diag(&[2.0, 0.0]), 1e-12).unwrap();
        assert!(r.dominated);
        assert_eq!(r.worst_margin, 0.0);
        let r = ky_fan_dominance(&diag(&[2.0, 0.0]), &diag(&[1.0, 1.0]), 1e-12).unwrap();
        assert!(!r.dominated);
        assert_eq!((r.worst_k, r.worst_margin), (1, -1.0));
        let x = diag(&[3.0, 0.5]);
        let r = ky_fan_dominance(&x, &x, 0.0).unwrap();
        assert!(r.dominated && r.worst_margin == 0.0);
        assert!(matches!(
            ky_fan_dominance(&diag(&[1.0]), &x, 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn padding_counts_zeros() {
        let sv = SingularValueList::from_unsorted(vec![1.0, 2.0]);
        assert_eq!(sv.ky_fan_prefix(4), vec![2.0, 3.0, 3.0, 3.0]);
        assert_eq!(sv.norm(NormSpec::KyFan(4), 4).unwrap(), 3.0);
    }

    #[test]
    fn parse_and_serde_roundtrip() {
        for text in [
            "kyfan:3",
            "schatten:1.5",
            "schatten:inf",
            "trace",
            "operator",
            "frobenius",
        ] {
            let spec: NormSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            let json = serde_json::to_string(&spec).unwrap();
            let back: NormSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
        }
        assert_eq!(
            serde_json::to_string(&NormSpec::Schatten(f64::INFINITY)).unwrap(),
            r#"{"variant":"schatten","p":"inf"}"#
        );
        assert!("schatten:0.5".parse::<NormSpec>().is_err());
        let list = NormSelector::parse_list("kyfan:all,schatten:2").unwrap();
        assert_eq!(list[0].expand(3).len(), 3);
    }
}
