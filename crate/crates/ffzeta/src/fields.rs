//! Exact arithmetic and enumeration in finite fields F_{p^n}.
//!
//! A field is described by its characteristic, extension degree and a
//! deterministic defining modulus: the lexicographically smallest monic
//! irreducible of that degree, where "lexicographically smallest" means
//! smallest integer encoding sum(c_i * p^i) of the non-leading coefficients.
//! This makes every serialized report reproducible bit for bit.
//!
//! Elements are coefficient vectors over F_p, little-endian in the root of
//! the modulus. Internally an element is often carried as its *rank*, the
//! integer sum(c_i * p^i) in [0, p^n); rank order is also enumeration order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("element does not belong to this field")]
    Mismatch,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("field too large: p^n exceeds 2^40")]
    TooLarge,
}

/// A concrete finite field F_{p^n} with its defining modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDesc {
    pub p: u64,
    pub n: u32,
    /// Monic modulus of degree n, little-endian, length n+1, last entry 1.
    pub modulus: Vec<u64>,
}

/// Element of a `FieldDesc`: coefficient vector of length n over F_p,
/// little-endian in the modulus root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem(pub Vec<u64>);

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for d in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if m == d {
            return true;
        }
        if m % d == 0 {
            return false;
        }
    }
    let mut d = 37u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// ---- polynomial arithmetic over F_p (little-endian u64 coefficient vectors) ----

fn ptrim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pmulmod(a: &[u64], b: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    premmod(&mut prod, g, p);
    prod
}

/// Reduce `a` modulo the monic polynomial `g` in place.
fn premmod(a: &mut Vec<u64>, g: &[u64], p: u64) {
    let dg = g.len() - 1;
    while a.len() > dg {
        let lead = *a.last().unwrap() % p;
        let k = a.len() - 1 - dg;
        if lead != 0 {
            for (i, &gi) in g.iter().enumerate() {
                let t = (gi * lead) % p;
                let idx = k + i;
                a[idx] = (a[idx] + p - t) % p;
            }
        }
        a.pop();
        ptrim(a);
        if a.is_empty() {
            break;
        }
    }
    ptrim(a);
}

fn pgcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        let mut r = a.clone();
        // make b monic for the reduction step
        let inv = modinv(*b.last().unwrap(), p);
        let bm: Vec<u64> = b.iter().map(|&c| c * inv % p).collect();
        premmod(&mut r, &bm, p);
        a = b;
        b = r;
    }
    a
}

pub fn modinv(a: u64, p: u64) -> u64 {
    // Fermat; p prime, a != 0 mod p
    modpow(a % p, p - 2, p)
}

pub fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// x^(p^k) mod g, computed by k-fold p-th powering.
fn xpow_pk(g: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut x = vec![0u64, 1];
    premmod(&mut x, g, p);
    for _ in 0..k {
        // raise to the p-th power by square and multiply
        let mut r = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                r = pmulmod(&r, &base, g, p);
            }
            base = pmulmod(&base, &base, g, p);
            e >>= 1;
        }
        x = r;
    }
    x
}

fn is_irreducible(g: &[u64], p: u64) -> bool {
    let n = (g.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    // x^(p^n) == x mod g
    let xq = xpow_pk(g, p, n);
    let mut x = vec![0u64, 1];
    premmod(&mut x, g, p);
    let mut diff: Vec<u64> = vec![0; xq.len().max(x.len())];
    for (i, &c) in xq.iter().enumerate() {
        diff[i] = c;
    }
    for (i, &c) in x.iter().enumerate() {
        diff[i] = (diff[i] + p - c) % p;
    }
    ptrim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // gcd(x^(p^(n/l)) - x, g) == 1 for every prime l | n
    let mut m = n;
    let mut primes = vec![];
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for l in primes {
        let xk = xpow_pk(g, p, n / l);
        let mut diff: Vec<u64> = vec![0; xk.len().max(2)];
        for (i, &c) in xk.iter().enumerate() {
            diff[i] = c;
        }
        diff[1] = (diff[1] + p - 1) % p;
        ptrim(&mut diff);
        let gc = pgcd(g.to_vec(), diff, p);
        if gc.len() != 1 {
            return false;
        }
    }
    true
}

/// Build F_{p^n} with the lexicographically smallest monic irreducible
/// modulus. Deterministic across runs and platforms.
pub fn make_field(p: u64, n: u32) -> Result<FieldDesc, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let bits = (n as f64) * (p as f64).log2();
    if bits > 40.0 {
        return Err(FieldError::TooLarge);
    }
    let q: u64 = (p as u128).pow(n) as u64;
    let mut low = 0u64;
    loop {
        debug_assert!(low < q, "no irreducible of degree {n} over F_{p}?");
        // candidate x^n + sum(c_i x^i), c = base-p digits of `low`
        let mut g = vec![0u64; n as usize + 1];
        let mut m = low;
        for gi in g.iter_mut().take(n as usize) {
            *gi = m % p;
            m /= p;
        }
        g[n as usize] = 1;
        if is_irreducible(&g, p) {
            return Ok(FieldDesc {
                p,
                n,
                modulus: g,
            });
        }
        low += 1;
    }
}

impl FieldDesc {
    pub fn q(&self) -> u64 {
        (self.p as u128).pow(self.n) as u64
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.n as usize])
    }

    pub fn one(&self) -> FieldElem {
        let mut v = vec![0; self.n as usize];
        v[0] = 1;
        FieldElem(v)
    }

    /// Element of the prime field viewed in this field.
    pub fn from_int(&self, c: u64) -> FieldElem {
        let mut v = vec![0; self.n as usize];
        v[0] = c % self.p;
        FieldElem(v)
    }

    pub fn rank_of(&self, x: &FieldElem) -> u64 {
        let mut r = 0u64;
        for &c in x.0.iter().rev() {
            r = r * self.p + c;
        }
        r
    }

    pub fn from_rank(&self, mut r: u64) -> FieldElem {
        let mut v = vec![0; self.n as usize];
        for vi in v.iter_mut() {
            *vi = r % self.p;
            r /= self.p;
        }
        FieldElem(v)
    }

    fn check(&self, x: &FieldElem) -> Result<(), FieldError> {
        if x.0.len() != self.n as usize || x.0.iter().any(|&c| c >= self.p) {
            return Err(FieldError::Mismatch);
        }
        Ok(())
    }

    pub fn add(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem(
            x.0.iter()
                .zip(&y.0)
                .map(|(&a, &b)| (a + b) % p)
                .collect(),
        )
    }

    pub fn sub(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem(
            x.0.iter()
                .zip(&y.0)
                .map(|(&a, &b)| (a + p - b) % p)
                .collect(),
        )
    }

    pub fn neg(&self, x: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem(x.0.iter().map(|&a| (p - a) % p).collect())
    }

    pub fn mul(&self, x: &FieldElem, y: &FieldElem) -> FieldElem {
        let mut v = pmulmod(&x.0, &y.0, &self.modulus, self.p);
        v.resize(self.n as usize, 0);
        FieldElem(v)
    }

    pub fn pow(&self, x: &FieldElem, mut e: u64) -> FieldElem {
        let mut r = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn is_zero(&self, x: &FieldElem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn inv(&self, x: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(x) {
            return None;
        }
        Some(self.pow(x, self.q() - 2))
    }

    /// All p^n elements in rank order (lexicographic on coefficient
    /// vectors read from the top coefficient down); first element is 0.
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q()).map(move |r| self.from_rank(r))
    }
}

/// The p-power Frobenius x -> x^p. Iterating n times is the identity.
pub fn frobenius(field: &FieldDesc, x: &FieldElem) -> Result<FieldElem, FieldError> {
    field.check(x)?;
    Ok(field.pow(x, field.p))
}

/// Quadratic character of x: 0 for x = 0, +1 for nonzero squares, -1 otherwise.
/// Agrees with x^((q-1)/2). Odd characteristic only.
pub fn quadratic_character(field: &FieldDesc, x: &FieldElem) -> Result<i32, FieldError> {
    if field.p == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    field.check(x)?;
    if field.is_zero(x) {
        return Ok(0);
    }
    let s = field.pow(x, (field.q() - 1) / 2);
    if s == field.one() {
        Ok(1)
    } else {
        Ok(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_prime() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.modulus, vec![0, 1]); // modulus = t
        assert_eq!(f.q(), 5);
    }

    #[test]
    fn make_field_f8_matches_exhaustive_scan() {
        // oracle: scan all 8 monic cubics over F_2 for the first irreducible
        let mut expected = None;
        'outer: for low in 0..8u64 {
            let g = vec![low & 1, (low >> 1) & 1, (low >> 2) & 1, 1];
            // irreducible over F_2 iff no root and not (x^2+x+1)^... for
            // cubics: no root suffices
            for r in 0..2u64 {
                let mut v = 0u64;
                for &c in g.iter().rev() {
                    v = (v * r + c) % 2;
                }
                if v == 0 {
                    continue 'outer;
                }
            }
            expected = Some(g);
            break;
        }
        let f = make_field(2, 3).unwrap();
        assert_eq!(f.modulus, expected.unwrap());
        assert_eq!(f.modulus, vec![1, 1, 0, 1]); // t^3 + t + 1
    }

    #[test]
    fn make_field_f25_matches_root_scan() {
        // oracle: smallest t^2 + c1 t + c0 with no root in F_5
        let mut expected = None;
        'outer: for low in 0..25u64 {
            let g = vec![low % 5, low / 5, 1];
            for r in 0..5u64 {
                if (r * r + g[1] * r + g[0]) % 5 == 0 {
                    continue 'outer;
                }
            }
            expected = Some(g);
            break;
        }
        let f = make_field(5, 2).unwrap();
        assert_eq!(f.modulus, expected.unwrap());
    }

    #[test]
    fn make_field_rejects_bad_input() {
        assert_eq!(make_field(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(make_field(5, 0).unwrap_err(), FieldError::ZeroDegree);
    }

    #[test]
    fn make_field_deterministic() {
        assert_eq!(make_field(7, 3).unwrap(), make_field(7, 3).unwrap());
    }

    #[test]
    fn enumerate_prime_field() {
        let f = make_field(5, 1).unwrap();
        let els: Vec<u64> = f.enumerate().map(|e| e.0[0]).collect();
        assert_eq!(els, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn enumerate_no_duplicates() {
        use std::collections::HashSet;
        for (p, n, q) in [(5, 2, 25), (5, 3, 125)] {
            let f = make_field(p, n).unwrap();
            let set: HashSet<FieldElem> = f.enumerate().collect();
            assert_eq!(set.len(), q);
            assert!(f.is_zero(&f.from_rank(0)));
        }
    }

    #[test]
    fn frobenius_prime_field_fixes() {
        let f = make_field(5, 1).unwrap();
        let x = f.from_int(3);
        assert_eq!(frobenius(&f, &x).unwrap(), x);
    }

    #[test]
    fn frobenius_order_two_on_f25() {
        let f = make_field(5, 2).unwrap();
        for r in 0..25 {
            let x = f.from_rank(r);
            let fx = frobenius(&f, &x).unwrap();
            assert_eq!(frobenius(&f, &fx).unwrap(), x);
        }
    }

    #[test]
    fn frobenius_is_pth_power_in_f125() {
        // square-and-multiply oracle: x^5 by explicit repeated multiplication
        let f = make_field(5, 3).unwrap();
        for r in [3u64, 17, 88, 124] {
            let x = f.from_rank(r);
            let mut y = f.one();
            for _ in 0..5 {
                y = f.mul(&y, &x);
            }
            assert_eq!(frobenius(&f, &x).unwrap(), y);
        }
    }

    #[test]
    fn frobenius_is_ring_homomorphism() {
        let f = make_field(5, 3).unwrap();
        for (r, s) in [(7u64, 99u64), (23, 54), (100, 3)] {
            let x = f.from_rank(r);
            let y = f.from_rank(s);
            let fx = frobenius(&f, &x).unwrap();
            let fy = frobenius(&f, &y).unwrap();
            assert_eq!(frobenius(&f, &f.add(&x, &y)).unwrap(), f.add(&fx, &fy));
            assert_eq!(frobenius(&f, &f.mul(&x, &y)).unwrap(), f.mul(&fx, &fy));
        }
    }

    #[test]
    fn quadratic_character_f5() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(quadratic_character(&f, &f.from_int(4)).unwrap(), 1);
        assert_eq!(quadratic_character(&f, &f.from_int(0)).unwrap(), 0);
        assert_eq!(quadratic_character(&f, &f.from_int(2)).unwrap(), -1);
    }

    #[test]
    fn quadratic_character_f25_against_square_table() {
        let f = make_field(5, 2).unwrap();
        let mut squares = std::collections::HashSet::new();
        for x in f.enumerate() {
            squares.insert(f.mul(&x, &x));
        }
        for x in f.enumerate() {
            let chi = quadratic_character(&f, &x).unwrap();
            if f.is_zero(&x) {
                assert_eq!(chi, 0);
            } else if squares.contains(&x) {
                assert_eq!(chi, 1);
            } else {
                assert_eq!(chi, -1);
            }
        }
    }

    #[test]
    fn quadratic_character_multiplicative() {
        let f = make_field(5, 2).unwrap();
        for (r, s) in [(3u64, 7u64), (11, 20), (24, 13)] {
            let x = f.from_rank(r);
            let y = f.from_rank(s);
            if f.is_zero(&x) || f.is_zero(&y) {
                continue;
            }
            let cx = quadratic_character(&f, &x).unwrap();
            let cy = quadratic_character(&f, &y).unwrap();
            let cxy = quadratic_character(&f, &f.mul(&x, &y)).unwrap();
            assert_eq!(cxy, cx * cy);
        }
    }

    #[test]
    fn multiplicative_group_order() {
        for (p, n) in [(5, 2), (7, 2), (5, 3)] {
            let f = make_field(p, n).unwrap();
            let q = f.q();
            for r in [1u64, 2, q / 2, q - 1] {
                let x = f.from_rank(r);
                if f.is_zero(&x) {
                    continue;
                }
                assert_eq!(f.pow(&x, q - 1), f.one());
            }
        }
    }

    #[test]
    fn char2_quadratic_character_rejected() {
        let f = make_field(2, 3).unwrap();
        assert_eq!(
            quadratic_character(&f, &f.one()).unwrap_err(),
            FieldError::EvenCharacteristic
        );
    }
}
