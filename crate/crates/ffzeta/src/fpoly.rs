//! Dense polynomials and rational functions over a finite base field F_q.
//!
//! Coefficients are element ranks of the base field; arithmetic goes through
//! the shared Zech tables. The base field of a function field stays small
//! (the counting extensions are handled in `counting`), so q <= 2^26 here.

use crate::counting::Zech;
use crate::fields::{make_field, FieldDesc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Base-field context: descriptor plus arithmetic tables.
#[derive(Clone)]
pub struct Fq {
    pub desc: FieldDesc,
    pub z: Arc<Zech>,
}

impl Fq {
    pub fn new(p: u64, m: u32) -> Fq {
        let desc = make_field(p, m).expect("valid base field");
        let z = Zech::shared(p, m);
        Fq { desc, z }
    }

    /// Interpret a prime power as a base field (smallest prime factorization).
    pub fn from_q(q: u64) -> Option<Fq> {
        let mut p = 2;
        while p * p <= q {
            if q % p == 0 {
                let mut m = 0;
                let mut v = q;
                while v % p == 0 {
                    v /= p;
                    m += 1;
                }
                if v != 1 {
                    return None;
                }
                return Some(Fq::new(p, m));
            }
            p += 1;
        }
        Some(Fq::new(q, 1)) // q itself prime
    }

    pub fn q(&self) -> u64 {
        self.z.q
    }
}

/// Polynomial over F_q, little-endian rank coefficients, no trailing zeros.
/// The zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqPoly(pub Vec<u64>);

impl FqPoly {
    pub fn zero() -> FqPoly {
        FqPoly(vec![])
    }

    pub fn one() -> FqPoly {
        FqPoly(vec![1])
    }

    pub fn constant(c: u64) -> FqPoly {
        if c == 0 {
            FqPoly(vec![])
        } else {
            FqPoly(vec![c])
        }
    }

    /// The monomial t.
    pub fn t() -> FqPoly {
        FqPoly(vec![0, 1])
    }

    pub fn from_coeffs(mut v: Vec<u64>) -> FqPoly {
        while v.last() == Some(&0) {
            v.pop();
        }
        FqPoly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn lead(&self) -> u64 {
        *self.0.last().expect("nonzero polynomial")
    }
}

impl Fq {
    pub fn padd(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let n = a.0.len().max(b.0.len());
        let mut v = vec![0u64; n];
        for (i, vi) in v.iter_mut().enumerate() {
            let x = a.0.get(i).copied().unwrap_or(0);
            let y = b.0.get(i).copied().unwrap_or(0);
            *vi = self.z.rank_add(x, y);
        }
        FqPoly::from_coeffs(v)
    }

    pub fn pneg(&self, a: &FqPoly) -> FqPoly {
        FqPoly(a.0.iter().map(|&c| self.z.neg(c)).collect())
    }

    pub fn psub(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        self.padd(a, &self.pneg(b))
    }

    pub fn pmul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        if a.is_zero() || b.is_zero() {
            return FqPoly::zero();
        }
        let mut v = vec![0u64; a.0.len() + b.0.len() - 1];
        for (i, &ai) in a.0.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.0.iter().enumerate() {
                v[i + j] = self.z.rank_add(v[i + j], self.z.mul(ai, bj));
            }
        }
        FqPoly::from_coeffs(v)
    }

    pub fn pscale(&self, a: &FqPoly, c: u64) -> FqPoly {
        if c == 0 {
            return FqPoly::zero();
        }
        FqPoly(a.0.iter().map(|&x| self.z.mul(x, c)).collect())
    }

    pub fn ppow(&self, a: &FqPoly, mut e: u64) -> FqPoly {
        let mut r = FqPoly::one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.pmul(&r, &b);
            }
            b = self.pmul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Quotient and remainder; b nonzero.
    pub fn pdivrem(&self, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly) {
        let db = b.deg().expect("division by zero polynomial");
        let binv = self.z.inv(b.lead());
        let mut r = a.0.clone();
        if r.len() < db + 1 {
            return (FqPoly::zero(), a.clone());
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() > db {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let c = self.z.mul(lead, binv);
                let k = r.len() - 1 - db;
                q[k] = c;
                for (i, &bi) in b.0.iter().enumerate() {
                    r[k + i] = self.z.rank_sub(r[k + i], self.z.mul(c, bi));
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
            if r.is_empty() {
                break;
            }
        }
        (FqPoly::from_coeffs(q), FqPoly::from_coeffs(r))
    }

    pub fn prem(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        self.pdivrem(a, b).1
    }

    /// Exact division; panics if not divisible.
    pub fn pdiv_exact(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let (q, r) = self.pdivrem(a, b);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, a: &FqPoly) -> FqPoly {
        if a.is_zero() {
            return FqPoly::zero();
        }
        self.pscale(a, self.z.inv(a.lead()))
    }

    pub fn pgcd(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.prem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Extended gcd: returns (g, u, v) with u a + v b = g, g monic.
    pub fn pxgcd(&self, a: &FqPoly, b: &FqPoly) -> (FqPoly, FqPoly, FqPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (FqPoly::one(), FqPoly::zero());
        let (mut t0, mut t1) = (FqPoly::zero(), FqPoly::one());
        while !r1.is_zero() {
            let (q, r) = self.pdivrem(&r0, &r1);
            let s = self.psub(&s0, &self.pmul(&q, &s1));
            let t = self.psub(&t0, &self.pmul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (FqPoly::zero(), FqPoly::zero(), FqPoly::zero());
        }
        let c = self.z.inv(r0.lead());
        (self.pscale(&r0, c), self.pscale(&s0, c), self.pscale(&t0, c))
    }

    pub fn derivative(&self, a: &FqPoly) -> FqPoly {
        if a.0.len() <= 1 {
            return FqPoly::zero();
        }
        let mut v = vec![0u64; a.0.len() - 1];
        for (i, vi) in v.iter_mut().enumerate() {
            let k = (i as u64 + 1) % self.z.p;
            let mut acc = 0u64;
            for _ in 0..k {
                acc = self.z.rank_add(acc, a.0[i + 1]);
            }
            *vi = acc;
        }
        FqPoly::from_coeffs(v)
    }

    pub fn eval(&self, a: &FqPoly, x: u64) -> u64 {
        self.z.eval_poly(&a.0, x)
    }

    pub fn pmulmod(&self, a: &FqPoly, b: &FqPoly, m: &FqPoly) -> FqPoly {
        self.prem(&self.pmul(a, b), m)
    }

    pub fn ppowmod(&self, a: &FqPoly, mut e: u128, m: &FqPoly) -> FqPoly {
        let mut r = self.prem(&FqPoly::one(), m);
        let mut b = self.prem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                r = self.pmulmod(&r, &b, m);
            }
            b = self.pmulmod(&b, &b, m);
            e >>= 1;
        }
        r
    }

    /// x^(q^k) mod m.
    fn xqk_mod(&self, k: u32, m: &FqPoly) -> FqPoly {
        let mut x = self.prem(&FqPoly::t(), m);
        for _ in 0..k {
            x = self.ppowmod(&x, self.q() as u128, m);
        }
        x
    }

    pub fn is_irreducible(&self, f: &FqPoly) -> bool {
        let n = match f.deg() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n as u32,
        };
        let xq = self.xqk_mod(n, f);
        if self.psub(&xq, &self.prem(&FqPoly::t(), f)) != FqPoly::zero() {
            return false;
        }
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
            let xk = self.xqk_mod(n / l, f);
            let diff = self.psub(&xk, &self.prem(&FqPoly::t(), f));
            if self.pgcd(f, &diff).deg() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Distinct roots of f in the base field.
    pub fn roots(&self, f: &FqPoly) -> Vec<u64> {
        let mut out = vec![];
        if f.is_zero() {
            return out;
        }
        for x in 0..self.q() {
            if self.eval(f, x) == 0 {
                out.push(x);
            }
        }
        out
    }

    /// p-th root of a coefficient (inverse of Frobenius on F_q).
    fn pth_root(&self, c: u64) -> u64 {
        // c^(p^(m-1)) where q = p^m
        let mut r = c;
        for _ in 0..self.desc.n.saturating_sub(1) {
            r = self.z.frob(r);
        }
        r
    }

    /// Full factorization into monic irreducibles with multiplicities.
    /// Deterministic: the equal-degree splitting seeds its generator from
    /// the polynomial itself.
    pub fn factor(&self, f: &FqPoly) -> Vec<(FqPoly, u32)> {
        let mut out: Vec<(FqPoly, u32)> = vec![];
        let mut stack = vec![(self.monic(f), 1u32)];
        while let Some((g, mult)) = stack.pop() {
            match g.deg() {
                None | Some(0) => continue,
                Some(1) => {
                    push_factor(&mut out, g, mult);
                    continue;
                }
                _ => {}
            }
            let d = self.derivative(&g);
            if d.is_zero() {
                // g = h(t^p): take p-th roots of the surviving coefficients
                let p = self.z.p as usize;
                let mut h = vec![];
                for (i, &c) in g.0.iter().enumerate() {
                    if i % p == 0 {
                        h.push(self.pth_root(c));
                    } else {
                        debug_assert_eq!(c, 0);
                    }
                }
                stack.push((FqPoly::from_coeffs(h), mult * self.z.p as u32));
                continue;
            }
            let sq = self.pgcd(&g, &d);
            if sq.deg() != Some(0) {
                stack.push((self.pdiv_exact(&g, &sq), mult));
                stack.push((sq, mult));
                continue;
            }
            // g squarefree: distinct-degree then equal-degree splitting
            let mut rest = g.clone();
            let mut deg = 1u32;
            while let Some(dr) = rest.deg() {
                if dr == 0 {
                    break;
                }
                if (dr as u32) < 2 * deg {
                    push_factor(&mut out, rest.clone(), mult);
                    break;
                }
                let xq = self.xqk_mod(deg, &rest);
                let split = self.pgcd(&rest, &self.psub(&xq, &self.prem(&FqPoly::t(), &rest)));
                if split.deg() != Some(0) {
                    for h in self.equal_degree_split(&split, deg) {
                        push_factor(&mut out, h, mult);
                    }
                    rest = self.pdiv_exact(&rest, &split);
                }
                deg += 1;
            }
        }
        out.sort_by(|a, b| poly_key(&a.0).cmp(&poly_key(&b.0)));
        out
    }

    /// Cantor-Zassenhaus splitting of a squarefree product of degree-d
    /// irreducibles (odd q).
    fn equal_degree_split(&self, f: &FqPoly, d: u32) -> Vec<FqPoly> {
        let n = f.deg().unwrap() as u32;
        if n == d {
            return vec![self.monic(f)];
        }
        let mut seed = 0xffu64 ^ (d as u64);
        for &c in &f.0 {
            seed = seed.wrapping_mul(0x100000001b3).wrapping_add(c);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e: u128 = ((self.q() as u128).pow(d) - 1) / 2;
        loop {
            let r = FqPoly::from_coeffs(
                (0..f.0.len() - 1)
                    .map(|_| rng.gen_range(0..self.q()))
                    .collect(),
            );
            if r.deg().is_none() {
                continue;
            }
            let s = self.ppowmod(&r, e, f);
            let g = self.pgcd(f, &self.psub(&s, &FqPoly::one()));
            if let Some(dg) = g.deg() {
                if dg > 0 && dg < n as usize {
                    let mut out = self.equal_degree_split(&g, d);
                    out.extend(self.equal_degree_split(&self.pdiv_exact(f, &g), d));
                    return out;
                }
            }
        }
    }

    /// Substitute t -> t + c.
    pub fn shift_t(&self, f: &FqPoly, c: u64) -> FqPoly {
        let mut acc = FqPoly::zero();
        let tc = FqPoly::from_coeffs(vec![c, 1]);
        for &co in f.0.iter().rev() {
            acc = self.padd(&self.pmul(&acc, &tc), &FqPoly::constant(co));
        }
        acc
    }
}

fn push_factor(out: &mut Vec<(FqPoly, u32)>, f: FqPoly, mult: u32) {
    for e in out.iter_mut() {
        if e.0 == f {
            e.1 += mult;
            return;
        }
    }
    out.push((f, mult));
}

/// Ordering key: (degree, coefficient vector from constant up).
pub fn poly_key(f: &FqPoly) -> (usize, Vec<u64>) {
    (f.0.len(), f.0.clone())
}

// ---- rational functions ----

/// Reduced rational function over F_q(t): gcd(num, den) = 1, den monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    pub num: FqPoly,
    pub den: FqPoly,
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc {
            num: FqPoly::zero(),
            den: FqPoly::one(),
        }
    }

    pub fn from_poly(p: FqPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: FqPoly::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.deg() == Some(0)
    }

    /// Constant in F_q, if it is one.
    pub fn as_constant(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        if self.num.deg() == Some(0) && self.den.deg() == Some(0) {
            Some(self.num.0[0])
        } else {
            None
        }
    }
}

impl Fq {
    pub fn rf(&self, num: FqPoly, den: FqPoly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = self.pgcd(&num, &den);
        let num = self.pdiv_exact(&num, &g);
        let den = self.pdiv_exact(&den, &g);
        let c = self.z.inv(den.lead());
        RatFunc {
            num: self.pscale(&num, c),
            den: self.pscale(&den, c),
        }
    }

    pub fn radd(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.rf(
            self.padd(&self.pmul(&a.num, &b.den), &self.pmul(&b.num, &a.den)),
            self.pmul(&a.den, &b.den),
        )
    }

    pub fn rsub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.rf(
            self.psub(&self.pmul(&a.num, &b.den), &self.pmul(&b.num, &a.den)),
            self.pmul(&a.den, &b.den),
        )
    }

    pub fn rmul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.rf(self.pmul(&a.num, &b.num), self.pmul(&a.den, &b.den))
    }

    pub fn rdiv(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        assert!(!b.is_zero());
        self.rf(self.pmul(&a.num, &b.den), self.pmul(&a.den, &b.num))
    }

    pub fn rneg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.pneg(&a.num),
            den: a.den.clone(),
        }
    }

    pub fn rscale(&self, a: &RatFunc, c: u64) -> RatFunc {
        if c == 0 {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.pscale(&a.num, c),
            den: a.den.clone(),
        }
    }

    pub fn rpow(&self, a: &RatFunc, e: u64) -> RatFunc {
        RatFunc {
            num: self.ppow(&a.num, e),
            den: self.ppow(&a.den, e),
        }
    }

    /// Substitute t -> 1/u, returning a rational function in u. Used to
    /// study the place at infinity through the finite-place machinery.
    pub fn subst_inv_t(&self, a: &RatFunc) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        let dn = a.num.deg().unwrap();
        let dd = a.den.deg().unwrap();
        let revn = FqPoly::from_coeffs(a.num.0.iter().rev().copied().collect());
        let revd = FqPoly::from_coeffs(a.den.0.iter().rev().copied().collect());
        let d = dn.max(dd);
        let un = self.pmul(&revn, &self.ppow(&FqPoly::t(), (d - dn) as u64));
        let ud = self.pmul(&revd, &self.ppow(&FqPoly::t(), (d - dd) as u64));
        self.rf(un, ud)
    }

    /// Substitute t -> t + c.
    pub fn subst_shift(&self, a: &RatFunc, c: u64) -> RatFunc {
        self.rf(self.shift_t(&a.num, c), self.shift_t(&a.den, c))
    }

    /// Evaluate at a point of an extension field (given via Zech tables and
    /// an embedding of base coefficients); None at a pole.
    pub fn eval_ext(&self, a: &RatFunc, big: &Zech, embed: &[u64], x: u64) -> Option<u64> {
        let num: Vec<u64> = a.num.0.iter().map(|&c| embed[c as usize]).collect();
        let den: Vec<u64> = a.den.0.iter().map(|&c| embed[c as usize]).collect();
        let dv = big.eval_poly(&den, x);
        if dv == 0 {
            return None;
        }
        Some(big.div(big.eval_poly(&num, x), dv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Fq {
        Fq::new(5, 1)
    }

    #[test]
    fn divrem_roundtrip() {
        let k = f5();
        let a = FqPoly::from_coeffs(vec![1, 2, 3, 4, 1]);
        let b = FqPoly::from_coeffs(vec![2, 0, 1]);
        let (q, r) = k.pdivrem(&a, &b);
        assert_eq!(k.padd(&k.pmul(&q, &b), &r), a);
        assert!(r.deg().unwrap_or(0) < b.deg().unwrap());
    }

    #[test]
    fn gcd_of_known_product() {
        let k = f5();
        let f = k.pmul(
            &FqPoly::from_coeffs(vec![1, 1]),
            &FqPoly::from_coeffs(vec![2, 1]),
        );
        let g = k.pmul(
            &FqPoly::from_coeffs(vec![1, 1]),
            &FqPoly::from_coeffs(vec![3, 1]),
        );
        assert_eq!(k.pgcd(&f, &g), FqPoly::from_coeffs(vec![1, 1]));
    }

    #[test]
    fn xgcd_bezout() {
        let k = f5();
        let a = FqPoly::from_coeffs(vec![1, 0, 2, 1]);
        let b = FqPoly::from_coeffs(vec![3, 1, 1]);
        let (g, u, v) = k.pxgcd(&a, &b);
        assert_eq!(k.padd(&k.pmul(&u, &a), &k.pmul(&v, &b)), g);
    }

    #[test]
    fn irreducibility_small_cases() {
        let k = f5();
        // t^2 + 1 = (t+2)(t+3) over F_5
        assert!(!k.is_irreducible(&FqPoly::from_coeffs(vec![1, 0, 1])));
        // t^2 + 2 has no roots, degree 2 => irreducible
        assert!(k.is_irreducible(&FqPoly::from_coeffs(vec![2, 0, 1])));
        assert!(k.is_irreducible(&FqPoly::from_coeffs(vec![3, 1])));
    }

    #[test]
    fn factor_recovers_known_factorization() {
        let k = f5();
        // f = t^3 - t = t (t-1)(t+1)
        let f = FqPoly::from_coeffs(vec![0, 4, 0, 1]);
        let fac = k.factor(&f);
        assert_eq!(fac.len(), 3);
        for (p, e) in &fac {
            assert_eq!(*e, 1);
            assert_eq!(p.deg(), Some(1));
        }
        let mut prod = FqPoly::one();
        for (p, e) in &fac {
            prod = k.pmul(&prod, &k.ppow(p, *e as u64));
        }
        assert_eq!(prod, f);
    }

    #[test]
    fn factor_with_multiplicity_and_quadratic() {
        let k = f5();
        // (t^2+2)^2 (t+1)^3
        let a = FqPoly::from_coeffs(vec![2, 0, 1]);
        let b = FqPoly::from_coeffs(vec![1, 1]);
        let f = k.pmul(&k.ppow(&a, 2), &k.ppow(&b, 3));
        let fac = k.factor(&f);
        assert_eq!(fac.len(), 2);
        let mut prod = FqPoly::one();
        for (p, e) in &fac {
            assert!(k.is_irreducible(p));
            prod = k.pmul(&prod, &k.ppow(p, *e as u64));
        }
        assert_eq!(prod, k.monic(&f));
    }

    #[test]
    fn ratfunc_reduction_and_arith() {
        let k = f5();
        // (t^2 - 1)/(t - 1) reduces to t + 1
        let f = k.rf(
            FqPoly::from_coeffs(vec![4, 0, 1]),
            FqPoly::from_coeffs(vec![4, 1]),
        );
        assert_eq!(f.num, FqPoly::from_coeffs(vec![1, 1]));
        assert_eq!(f.den, FqPoly::one());
        let g = k.rf(FqPoly::one(), FqPoly::t());
        let s = k.radd(&f, &g);
        // (t+1) + 1/t = (t^2 + t + 1)/t
        assert_eq!(s.num, FqPoly::from_coeffs(vec![1, 1, 1]));
        assert_eq!(s.den, FqPoly::t());
    }

    #[test]
    fn subst_inv_t_involution_on_poly_degree() {
        let k = f5();
        let f = RatFunc::from_poly(FqPoly::from_coeffs(vec![3, 0, 1])); // t^2 + 3
        let g = k.subst_inv_t(&f);
        // (3u^2 + 1)/u^2
        assert_eq!(g.num, FqPoly::from_coeffs(vec![1, 0, 3]));
        assert_eq!(g.den, FqPoly::from_coeffs(vec![0, 0, 1]));
        let back = k.subst_inv_t(&g);
        assert_eq!(back, f);
    }

    #[test]
    fn shift_t_is_evaluation_compatible() {
        let k = f5();
        let f = FqPoly::from_coeffs(vec![1, 2, 0, 3]);
        let g = k.shift_t(&f, 2);
        for x in 0..5 {
            assert_eq!(k.eval(&g, x), k.eval(&f, (x + 2) % 5));
        }
    }
}
