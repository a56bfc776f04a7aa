//! Exact polynomials, truncated power series and rational functions over Q.
//!
//! `ZRational` is the shared currency of all the zeta and L identities: a
//! reduced fraction of integer-coefficient polynomials with denominator
//! constant term 1. Reconstruction from a truncated series is done by
//! solving the Hankel linear system exactly and re-verifying every known
//! coefficient, including two slack coefficients beyond the degree bounds.
//! The only floating point in the crate is the complex root certificate of
//! `weil_check`, which runs on the exact squarefree part.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("empty count list")]
    EmptyCounts,
    #[error("series precision {have} below required {need}")]
    InsufficientPrecision { have: usize, need: usize },
    #[error("no rational function with degree bounds ({0}, {1}) matches the series")]
    Inconsistent(usize, usize),
    #[error("constant term of the polynomial must be 1")]
    ConstantTermNotOne,
    #[error("denominator vanishes at t = 0")]
    DenominatorVanishesAtZero,
}

pub type QP = Vec<BigRational>;

fn trim(v: &mut QP) {
    while v.last().map(|c| c.is_zero()) == Some(true) {
        v.pop();
    }
}

pub fn qp_from_ints(v: &[i64]) -> QP {
    let mut out: QP = v
        .iter()
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    trim(&mut out);
    out
}

pub fn qp_one() -> QP {
    vec![BigRational::one()]
}

pub fn qp_deg(a: &QP) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn qp_add(a: &QP, b: &QP) -> QP {
    let mut v = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, vi) in v.iter_mut().enumerate() {
        if i < a.len() {
            *vi += &a[i];
        }
        if i < b.len() {
            *vi += &b[i];
        }
    }
    trim(&mut v);
    v
}

pub fn qp_sub(a: &QP, b: &QP) -> QP {
    let mut v = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, vi) in v.iter_mut().enumerate() {
        if i < a.len() {
            *vi += &a[i];
        }
        if i < b.len() {
            *vi -= &b[i];
        }
    }
    trim(&mut v);
    v
}

pub fn qp_mul(a: &QP, b: &QP) -> QP {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            v[i + j] += ai * bj;
        }
    }
    trim(&mut v);
    v
}

pub fn qp_scale(a: &QP, c: &BigRational) -> QP {
    let mut v: QP = a.iter().map(|x| x * c).collect();
    trim(&mut v);
    v
}

/// Quotient and remainder over Q.
pub fn qp_divrem(a: &QP, b: &QP) -> (QP, QP) {
    let db = qp_deg(b).expect("division by zero polynomial");
    let mut r = a.clone();
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    while r.len() > db {
        let c = r.last().unwrap() / &lead;
        let k = r.len() - 1 - db;
        q[k] = c.clone();
        for (i, bi) in b.iter().enumerate() {
            let t = bi * &c;
            r[k + i] -= t;
        }
        r.pop();
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    trim(&mut q);
    (q, r)
}

pub fn qp_div_exact(a: &QP, b: &QP) -> Option<QP> {
    let (q, r) = qp_divrem(a, b);
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

pub fn qp_gcd(a: &QP, b: &QP) -> QP {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = qp_divrem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(d) = qp_deg(&a) {
        let lead = a[d].clone();
        a = qp_scale(&a, &lead.recip());
    }
    a
}

pub fn qp_derivative(a: &QP) -> QP {
    if a.len() <= 1 {
        return vec![];
    }
    let mut v: QP = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut v);
    v
}

pub fn qp_eval(a: &QP, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in a.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Substitute t -> c t.
pub fn qp_scale_var(a: &QP, c: &BigRational) -> QP {
    let mut pw = BigRational::one();
    let mut v = Vec::with_capacity(a.len());
    for coeff in a {
        v.push(coeff * &pw);
        pw *= c;
    }
    trim(&mut v);
    v
}

pub fn qp_is_integral(a: &QP) -> bool {
    a.iter().all(|c| c.is_integer())
}

pub fn qp_to_bigints(a: &QP) -> Option<Vec<BigInt>> {
    if !qp_is_integral(a) {
        return None;
    }
    Some(a.iter().map(|c| c.to_integer()).collect())
}

/// Exact rational function over Q: reduced, denominator constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZRational {
    pub num: QP,
    pub den: QP,
}

impl ZRational {
    pub fn new(num: QP, den: QP) -> Result<ZRational, SeriesError> {
        if den.is_empty() {
            return Err(SeriesError::DenominatorVanishesAtZero);
        }
        if num.is_empty() {
            return Ok(ZRational {
                num: vec![],
                den: qp_one(),
            });
        }
        let g = qp_gcd(&num, &den);
        let num = qp_div_exact(&num, &g).unwrap();
        let den = qp_div_exact(&den, &g).unwrap();
        if den[0].is_zero() {
            return Err(SeriesError::DenominatorVanishesAtZero);
        }
        let c = den[0].clone().recip();
        Ok(ZRational {
            num: qp_scale(&num, &c),
            den: qp_scale(&den, &c),
        })
    }

    pub fn one() -> ZRational {
        ZRational {
            num: qp_one(),
            den: qp_one(),
        }
    }

    pub fn from_poly(p: QP) -> ZRational {
        ZRational::new(p, qp_one()).unwrap()
    }

    pub fn mul(&self, other: &ZRational) -> ZRational {
        ZRational::new(qp_mul(&self.num, &other.num), qp_mul(&self.den, &other.den)).unwrap()
    }

    pub fn div(&self, other: &ZRational) -> ZRational {
        ZRational::new(qp_mul(&self.num, &other.den), qp_mul(&self.den, &other.num))
            .expect("division producing a pole at 0")
    }

    pub fn inv(&self) -> ZRational {
        ZRational::new(self.den.clone(), self.num.clone()).expect("numerator vanishes at 0")
    }

    pub fn pow(&self, e: i64) -> ZRational {
        let mut r = ZRational::one();
        for _ in 0..e.unsigned_abs() {
            r = r.mul(self);
        }
        if e < 0 {
            r = r.inv();
        }
        r
    }

    /// Whether the numerator has constant term +-1 (zeta-normalized form).
    pub fn is_zeta_normalized(&self) -> bool {
        match self.num.first() {
            None => false,
            Some(c) => c.abs() == BigRational::one(),
        }
    }

    /// Expand to a truncated series (denominator is a unit at 0).
    pub fn series(&self, precision: usize) -> TruncatedSeries {
        let mut c = vec![BigRational::zero(); precision + 1];
        for k in 0..=precision {
            let mut acc = if k < self.num.len() {
                self.num[k].clone()
            } else {
                BigRational::zero()
            };
            for j in 1..=k.min(self.den.len() - 1) {
                let t = &self.den[j] * &c[k - j];
                acc -= t;
            }
            c[k] = acc;
        }
        TruncatedSeries {
            coeffs: c,
            precision,
        }
    }

    /// Substitute t -> c t.
    pub fn scale_var(&self, c: &BigRational) -> ZRational {
        ZRational::new(qp_scale_var(&self.num, c), qp_scale_var(&self.den, c)).unwrap()
    }
}

/// Exact truncated power series c_0 .. c_N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub coeffs: QP,
    pub precision: usize,
}

impl TruncatedSeries {
    pub fn new(coeffs: QP, precision: usize) -> TruncatedSeries {
        let mut c = coeffs;
        c.resize(precision + 1, BigRational::zero());
        TruncatedSeries {
            coeffs: c,
            precision,
        }
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.precision.min(other.precision);
        let mut c = vec![BigRational::zero(); n + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for j in 0..=k {
                acc += &self.coeffs[j] * &other.coeffs[k - j];
            }
            *ck = acc;
        }
        TruncatedSeries {
            coeffs: c,
            precision: n,
        }
    }

    pub fn mul_poly(&self, p: &QP) -> TruncatedSeries {
        let n = self.precision;
        let mut c = vec![BigRational::zero(); n + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for (j, pj) in p.iter().enumerate() {
                if j > k {
                    break;
                }
                acc += pj * &self.coeffs[k - j];
            }
            *ck = acc;
        }
        TruncatedSeries {
            coeffs: c,
            precision: n,
        }
    }
}

/// exp(sum N_n t^n / n) truncated at t^m, from counts N_1..N_m.
pub fn zeta_from_counts(counts: &[BigInt]) -> Result<TruncatedSeries, SeriesError> {
    if counts.is_empty() {
        return Err(SeriesError::EmptyCounts);
    }
    let m = counts.len();
    let mut c = vec![BigRational::zero(); m + 1];
    c[0] = BigRational::one();
    // Z' = (sum N_n t^{n-1}) Z, so k c_k = sum_{j=1..k} N_j c_{k-j}
    for k in 1..=m {
        let mut acc = BigRational::zero();
        for j in 1..=k {
            acc += BigRational::from_integer(counts[j - 1].clone()) * &c[k - j];
        }
        c[k] = acc / BigRational::from_integer(BigInt::from(k));
    }
    Ok(TruncatedSeries {
        coeffs: c,
        precision: m,
    })
}

pub fn zeta_from_counts_i64(counts: &[i64]) -> Result<TruncatedSeries, SeriesError> {
    let v: Vec<BigInt> = counts.iter().map(|&n| BigInt::from(n)).collect();
    zeta_from_counts(&v)
}

/// Exact solve of the Hankel system: the unique rational function with
/// numerator degree <= deg_num and denominator degree <= deg_den matching
/// the series, if it exists. Requires precision >= deg_num + deg_den + 2
/// so that two slack coefficients certify the fit.
pub fn rational_reconstruct(
    series: &TruncatedSeries,
    deg_num: usize,
    deg_den: usize,
) -> Result<ZRational, SeriesError> {
    let need = deg_num + deg_den + 2;
    if series.precision < need {
        return Err(SeriesError::InsufficientPrecision {
            have: series.precision,
            need,
        });
    }
    let c = &series.coeffs;
    // unknown denominator d_0 = 1, d_1..d_D; rows k = deg_num+1 .. deg_num+D:
    //   sum_{j=0..D} d_j c_{k-j} = 0
    let dd = deg_den;
    let mut m: Vec<QP> = Vec::with_capacity(dd);
    for k in (deg_num + 1)..=(deg_num + dd) {
        let mut row: QP = Vec::with_capacity(dd + 1);
        for j in 1..=dd {
            row.push(if k >= j {
                c[k - j].clone()
            } else {
                BigRational::zero()
            });
        }
        row.push(-c[k].clone()); // rhs
        m.push(row);
    }
    let den_tail = solve_gauss(&mut m, dd);
    let mut den = qp_one();
    den.extend(den_tail);
    trim(&mut den);
    // numerator from convolution, then verify every known coefficient
    let prod = series.mul_poly(&den);
    let mut num: QP = prod.coeffs[..=deg_num.min(prod.precision)].to_vec();
    trim(&mut num);
    for k in (deg_num + 1)..=series.precision {
        if !prod.coeffs[k].is_zero() {
            return Err(SeriesError::Inconsistent(deg_num, deg_den));
        }
    }
    ZRational::new(num, den)
}

/// Gaussian elimination over Q; underdetermined directions are set to zero.
/// Rows carry n unknowns plus a trailing right-hand side.
fn solve_gauss(m: &mut [QP], n: usize) -> QP {
    let rows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for col in 0..n {
        let mut piv = None;
        for (r, mr) in m.iter().enumerate().take(rows).skip(row) {
            if !mr[col].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        m.swap(row, piv);
        let inv = m[row][col].clone().recip();
        for j in col..=n {
            m[row][j] *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let t = &m[row][j] * &f;
                    m[r][j] -= t;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == rows {
            break;
        }
    }
    (0..n)
        .map(|col| match pivot_of_col[col] {
            Some(r) => m[r][n].clone(),
            None => BigRational::zero(),
        })
        .collect()
}

// ---- Weil number certificate ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeilReport {
    pub pass: bool,
    pub weight: i64,
    pub q: u64,
    pub tol: f64,
    /// offending inverse roots as (re, im, |alpha|)
    pub offenders: Vec<(f64, f64, f64)>,
}

/// Complex roots by Durand-Kerner with Newton polish; assumes simple roots.
fn complex_roots(p: &[f64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    if d == 0 {
        return vec![];
    }
    let lead = p[d];
    let monic: Vec<f64> = p.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..d].iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            Complex64::from_polar(
                radius * 0.8,
                2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.31,
            )
        })
        .collect();
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    // Newton polish
    let deriv: Vec<f64> = (1..=d).map(|i| monic[i] * i as f64).collect();
    let evald = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in deriv.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for zi in z.iter_mut() {
        for _ in 0..8 {
            let dv = evald(*zi);
            if dv.norm() < 1e-300 {
                break;
            }
            *zi -= eval(*zi) / dv;
        }
    }
    z
}

/// Check that every complex inverse root of P has absolute value q^(w/2)
/// within tol. P must have P(0) = 1. Exact squarefree reduction happens
/// first so that multiple roots do not degrade the certificate.
pub fn weil_check(p: &QP, w: i64, q: u64, tol: f64) -> Result<WeilReport, SeriesError> {
    if p.first().map(|c| c.is_one()) != Some(true) {
        return Err(SeriesError::ConstantTermNotOne);
    }
    let target = (q as f64).powf(w as f64 / 2.0);
    let mut report = WeilReport {
        pass: true,
        weight: w,
        q,
        tol,
        offenders: vec![],
    };
    if p.len() == 1 {
        return Ok(report);
    }
    // exact squarefree part, then float roots
    let g = qp_gcd(p, &qp_derivative(p));
    let sf = qp_div_exact(p, &g).unwrap();
    let pf: Vec<f64> = sf
        .iter()
        .map(|c| c.to_f64().expect("coefficient fits in f64"))
        .collect();
    for root in complex_roots(&pf) {
        // inverse root alpha = 1/root
        let alpha = Complex64::new(1.0, 0.0) / root;
        let err = (alpha.norm() - target).abs();
        if err >= tol {
            report.pass = false;
            report.offenders.push((alpha.re, alpha.im, alpha.norm()));
        }
    }
    Ok(report)
}

/// Exact functional equation: find eps in {+1,-1} with
/// q^(w d / 2) t^d P(1/(q^w t)) = eps P(t); None if neither sign works.
pub fn functional_equation_check(p: &QP, w: i64, q: u64) -> Option<i8> {
    let d = qp_deg(p)?;
    if d == 0 {
        return Some(1);
    }
    let wd = w * d as i64;
    if wd.rem_euclid(2) != 0 {
        // q^(wd/2) irrational: with a nonzero leading coefficient the
        // comparison cannot hold over Q
        return None;
    }
    // Q_m = P_{d-m} q^(w m - w d / 2)
    let qb = BigRational::from_integer(BigInt::from(q));
    let mut transformed: QP = Vec::with_capacity(d + 1);
    for m in 0..=d {
        let e = w * m as i64 - wd / 2;
        let scale = if e >= 0 {
            num_traits::pow::pow(qb.clone(), e as usize)
        } else {
            num_traits::pow::pow(qb.clone().recip(), (-e) as usize)
        };
        transformed.push(&p[d - m] * scale);
    }
    trim(&mut transformed);
    if transformed == *p {
        return Some(1);
    }
    let neg: QP = p.iter().map(|c| -c).collect();
    if transformed == neg {
        return Some(-1);
    }
    None
}

/// Exact multiplicity of the root t = 1/q, by repeated division by (1 - qt).
pub fn root_multiplicity_at_inv_q(p: &QP, q: u64) -> usize {
    let lin = vec![
        BigRational::one(),
        -BigRational::from_integer(BigInt::from(q)),
    ];
    let mut mult = 0;
    let mut cur = p.clone();
    while let Some(next) = qp_div_exact(&cur, &lin) {
        mult += 1;
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    mult
}

// ---- serialization of ZRational as integer coefficient lists ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZRationalJson {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl ZRational {
    pub fn to_json(&self) -> ZRationalJson {
        ZRationalJson {
            num: qp_to_i64s(&self.num),
            den: qp_to_i64s(&self.den),
        }
    }
}

pub fn qp_to_i64s(v: &QP) -> Vec<i64> {
    v.iter()
        .map(|c| {
            assert!(c.is_integer(), "non-integer coefficient in report");
            c.to_integer().to_i64().expect("coefficient fits in i64")
        })
        .collect()
}
