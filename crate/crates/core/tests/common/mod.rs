//! Brute-force reference implementations in double-double arithmetic.
//!
//! Hermitian matrices are handled through their real symmetric embedding
//! `[[X, −Y], [Y, X]]`, diagonalized by a classical two-sided Jacobi
//! iteration that shares no code with the library eigensolver. A matrix
//! function `f(H)` is read off the top-left and bottom-left blocks of
//! `f(embedding)`.

#![allow(clippy::needless_range_loop)]

#![allow(dead_code)]

use normlab_core::linalg::ComplexMatrix;
use normlab_core::scalar::{Complex, DoubleDouble, Real};

pub type DD = DoubleDouble;

pub fn dd(x: f64) -> DD {
    DD::from_f64(x)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct OMat {
    pub n: usize,
    pub d: Vec<Complex<DD>>,
}

impl OMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            d: vec![Complex::new(dd(0.0), dd(0.0)); n * n],
        }
    }

    pub fn from_lib(m: &ComplexMatrix<f64>) -> Self {
        assert_eq!(m.rows(), m.cols());
        Self {
            n: m.rows(),
            d: m.data().iter().map(|z| Complex::new(dd(z.re), dd(z.im))).collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex<DD> {
        self.d[i * self.n + j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(dd(0.0), dd(0.0));
                for k in 0..n {
                    acc = acc + self.at(i, k) * o.at(k, j);
                }
                out.d[i * n + j] = acc;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.d[j * n + i] = self.at(i, j).conj();
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            d: self.d.iter().zip(&o.d).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn hermitize(&self) -> Self {
        let half = dd(0.5);
        let a = self.adjoint();
        Self {
            n: self.n,
            d: self.d.iter().zip(&a.d).map(|(x, y)| (*x + *y) * half).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.d
            .iter()
            .map(|z| (z.re * z.re + z.im * z.im).to_f64())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − lib‖_F / ‖self‖_F`.
    pub fn rel_err(&self, lib: &ComplexMatrix<f64>) -> f64 {
        let other = Self::from_lib(lib);
        let diff = Self {
            n: self.n,
            d: self.d.iter().zip(&other.d).map(|(a, b)| *a - *b).collect(),
        };
        diff.frobenius() / self.frobenius().max(f64::MIN_POSITIVE)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real
/// symmetric matrix.
fn jacobi(mut a: Vec<Vec<DD>>) -> (Vec<DD>, Vec<Vec<DD>>) {
    let n = a.len();
    let mut v: Vec<Vec<DD>> = (0..n)
        .map(|i| (0..n).map(|j| dd(if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x.to_f64().abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].to_f64().abs())
            .fold(0.0, f64::max);
        if off <= 1e-31 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].to_f64().abs() <= 1e-34 * scale {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (dd(2.0) * a[p][q]);
                let sign = if theta.to_f64() >= 0.0 { dd(1.0) } else { dd(-1.0) };
                let t = sign / (theta.abs() + (theta * theta + dd(1.0)).sqrt());
                let c = dd(1.0) / (t * t + dd(1.0)).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    (vals, vecs)
}

fn embed(h: &OMat) -> Vec<Vec<DD>> {
    let n = h.n;
    let mut s = vec![vec![dd(0.0); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h.at(i, j);
            s[i][j] = z.re;
            s[i + n][j + n] = z.re;
            s[i][j + n] = -z.im;
            s[i + n][j] = z.im;
        }
    }
    s
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigenvalues(h: &OMat) -> Vec<DD> {
    let (vals, _) = jacobi(embed(&h.hermitize()));
    let mut out: Vec<DD> = vals.iter().step_by(2).copied().collect();
    out.reverse();
    out
}

/// `f(H)` for Hermitian `H`.
pub fn herm_fn(h: &OMat, f: impl Fn(DD) -> DD) -> OMat {
    let n = h.n;
    let (vals, vecs) = jacobi(embed(&h.hermitize()));
    let fv: Vec<DD> = vals.iter().map(|&l| f(l)).collect();
    let entry = |i: usize, j: usize| -> DD { (0..2 * n).map(|k| vecs[i][k] * fv[k] * vecs[j][k]).sum() };
    let mut out = OMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.d[i * n + j] = Complex::new(entry(i, j), entry(i + n, j));
        }
    }
    out
}

pub fn power(h: &OMat, x: f64) -> OMat {
    let e = dd(x);
    herm_fn(h, |l| if l.to_f64() > 0.0 { l.powf(e) } else { dd(0.0) })
}

/// `A^{1/2} (A^{−1/2} B A^{−1/2})^t A^{1/2}`.
pub fn t_mean(a: &OMat, b: &OMat, t: f64) -> OMat {
    let half = herm_fn(a, |l| l.sqrt());
    let inv_half = herm_fn(a, |l| dd(1.0) / l.sqrt());
    let inner = inv_half.mul(b).mul(&inv_half);
    half.mul(&power(&inner, t)).mul(&half)
}

/// Singular values, descending, from the spectrum of `M*M`.
pub fn singular_values(m: &OMat) -> Vec<DD> {
    eigenvalues(&m.adjoint().mul(m))
        .into_iter()
        .map(|l| if l.to_f64() > 0.0 { l.sqrt() } else { dd(0.0) })
        .collect()
}

pub fn ky_fan(sv: &[DD], k: usize) -> f64 {
    sv.iter().take(k).copied().sum::<DD>().to_f64()
}

pub fn schatten(sv: &[DD], p: f64) -> f64 {
    if p.is_infinite() {
        return sv[0].to_f64();
    }
    let e = dd(p);
    let s: DD = sv.iter().filter(|x| x.to_f64() > 0.0).map(|x| x.powf(e)).sum();
    s.powf(dd(1.0 / p)).to_f64()
}
