//! Places of the rational function field K = F_q(t): monic irreducible
//! polynomials in t together with the place at infinity. The base curve is
//! the projective line, so residue fields, valuations and the product
//! formula are all explicit.

use crate::counting::{embed_subfield, Zech};
use crate::fields::{make_field, FieldDesc, FieldElem};
use crate::fpoly::{poly_key, Fq, FqPoly, RatFunc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaceError {
    #[error("valuation of the zero function is undefined")]
    ZeroFunction,
    #[error("function has a pole at the place")]
    Pole,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    /// A monic irreducible polynomial in t.
    Finite(FqPoly),
    Infinity,
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.deg().expect("nonconstant place polynomial"),
            Place::Infinity => 1,
        }
    }

    /// N(v) = q^deg(v).
    pub fn norm(&self, q: u64) -> u64 {
        q.pow(self.degree() as u32)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }
}

/// JSON form: {"kind": "finite"|"infinity", "poly": [..]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaceJson {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<u64>>,
}

impl Place {
    pub fn to_json(&self) -> PlaceJson {
        match self {
            Place::Finite(p) => PlaceJson {
                kind: "finite".into(),
                poly: Some(p.0.clone()),
            },
            Place::Infinity => PlaceJson {
                kind: "infinity".into(),
                poly: None,
            },
        }
    }
}

/// All monic irreducibles of the exact degree, sorted by coefficient key.
pub fn monic_irreducibles(fq: &Fq, degree: usize) -> Vec<FqPoly> {
    let q = fq.q();
    let total = q.pow(degree as u32);
    let mut out = vec![];
    for low in 0..total {
        let mut v = Vec::with_capacity(degree + 1);
        let mut m = low;
        for _ in 0..degree {
            v.push(m % q);
            m /= q;
        }
        v.push(1);
        let f = FqPoly(v);
        if fq.is_irreducible(&f) {
            out.push(f);
        }
    }
    out
}

/// All finite places of degree <= d, sorted by (degree, lexicographic
/// polynomial), followed by the place at infinity.
pub fn places_up_to(fq: &Fq, d: usize) -> Vec<Place> {
    let mut out = vec![];
    for e in 1..=d {
        let mut irr = monic_irreducibles(fq, e);
        irr.sort_by_key(poly_key);
        out.extend(irr.into_iter().map(Place::Finite));
    }
    out.push(Place::Infinity);
    out
}

/// Number of degree-e places predicted by Moebius counting of monic
/// irreducibles: (1/e) sum_{f|e} mu(f) q^(e/f).
pub fn place_count_formula(q: u64, e: u64) -> u64 {
    let mobius = |mut n: u64| -> i64 {
        let mut m = 1i64;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                n /= d;
                if n % d == 0 {
                    return 0;
                }
                m = -m;
            }
            d += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    };
    let mut acc = 0i64;
    for f in 1..=e {
        if e % f == 0 {
            acc += mobius(f) * (q.pow((e / f) as u32) as i64);
        }
    }
    (acc / e as i64) as u64
}

/// Multiplicity of the irreducible pi in the nonzero polynomial f.
fn poly_valuation(fq: &Fq, f: &FqPoly, pi: &FqPoly) -> i64 {
    let mut v = 0;
    let mut cur = f.clone();
    loop {
        let (q, r) = fq.pdivrem(&cur, pi);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        cur = q;
        if cur.deg().is_none() {
            return v;
        }
    }
}

/// v-adic valuation of a nonzero rational function. At infinity this is
/// deg(den) - deg(num); the product formula sum_v val_v(f) deg(v) = 0
/// holds for every f.
pub fn local_valuation(fq: &Fq, f: &RatFunc, v: &Place) -> Result<i64, PlaceError> {
    if f.is_zero() {
        return Err(PlaceError::ZeroFunction);
    }
    Ok(match v {
        Place::Infinity => f.den.deg().unwrap() as i64 - f.num.deg().unwrap() as i64,
        Place::Finite(pi) => poly_valuation(fq, &f.num, pi) - poly_valuation(fq, &f.den, pi),
    })
}

/// The residue field F_{q^deg(v)} together with the image of t at the
/// place, realized inside the deterministic field tower.
pub struct ResidueField {
    pub field: FieldDesc,
    zech: std::sync::Arc<Zech>,
    /// image of base-field ranks inside the residue field
    embed: Vec<u64>,
    /// rank of the image of t (a root of the place polynomial); None at infinity
    t_image: Option<u64>,
}

impl ResidueField {
    pub fn new(fq: &Fq, v: &Place) -> ResidueField {
        let n = fq.desc.n * v.degree() as u32;
        let field = make_field(fq.desc.p, n).expect("residue field parameters");
        let zech = Zech::shared(fq.desc.p, n);
        let embed = embed_subfield(&fq.desc, &zech);
        let t_image = match v {
            Place::Infinity => None,
            Place::Finite(pi) => {
                let coeffs: Vec<u64> = pi.0.iter().map(|&c| embed[c as usize]).collect();
                let mut root = None;
                for r in 0..zech.q {
                    if zech.eval_poly(&coeffs, r) == 0 {
                        root = Some(r);
                        break;
                    }
                }
                Some(root.expect("place polynomial has a root in its residue field"))
            }
        };
        ResidueField {
            field,
            zech,
            embed,
            t_image,
        }
    }

    fn elem(&self, rank: u64) -> FieldElem {
        self.field.from_rank(rank)
    }
}

/// Image of f in the residue field at v; requires val_v(f) >= 0.
pub fn residue(fq: &Fq, f: &RatFunc, v: &Place) -> Result<FieldElem, PlaceError> {
    if f.is_zero() {
        let rf = ResidueField::new(fq, v);
        return Ok(rf.field.zero());
    }
    if local_valuation(fq, f, v)? < 0 {
        return Err(PlaceError::Pole);
    }
    let rf = ResidueField::new(fq, v);
    match v {
        Place::Infinity => {
            // val >= 0 means deg(den) >= deg(num); residue is the ratio of
            // top coefficients when equal, else 0
            let dn = f.num.deg().unwrap();
            let dd = f.den.deg().unwrap();
            if dn < dd {
                Ok(rf.field.zero())
            } else {
                let r = fq.z.div(f.num.lead(), f.den.lead());
                Ok(rf.elem(rf.embed[r as usize]))
            }
        }
        Place::Finite(_) => {
            let x = rf.t_image.unwrap();
            // reduced fraction with val >= 0 has den coprime to pi
            let num: Vec<u64> = f.num.0.iter().map(|&c| rf.embed[c as usize]).collect();
            let den: Vec<u64> = f.den.0.iter().map(|&c| rf.embed[c as usize]).collect();
            let dv = rf.zech.eval_poly(&den, x);
            debug_assert!(dv != 0);
            let r = rf.zech.div(rf.zech.eval_poly(&num, x), dv);
            Ok(rf.elem(r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Fq {
        Fq::new(5, 1)
    }

    #[test]
    fn degree_one_places_of_f5() {
        let k = f5();
        let ps = places_up_to(&k, 1);
        // 5 finite places (t - a) plus infinity
        assert_eq!(ps.len(), 6);
        assert!(ps.last().unwrap().is_infinity());
        for p in &ps[..5] {
            assert_eq!(p.degree(), 1);
        }
    }

    #[test]
    fn degree_two_places_of_f5() {
        let k = f5();
        let ps = places_up_to(&k, 2);
        // adds (25 - 5)/2 = 10 quadratic places
        assert_eq!(ps.len(), 6 + 10);
    }

    #[test]
    fn degree_one_places_of_f7() {
        let k = Fq::new(7, 1);
        assert_eq!(places_up_to(&k, 1).len(), 8);
    }

    #[test]
    fn place_counts_match_necklace_formula() {
        let k = f5();
        for e in 1..=4usize {
            let n = monic_irreducibles(&k, e).len() as u64;
            assert_eq!(n, place_count_formula(5, e as u64), "degree {e}");
        }
    }

    #[test]
    fn valuations_of_t_squared() {
        let k = f5();
        let f = RatFunc::from_poly(k.pmul(&FqPoly::t(), &FqPoly::t()));
        let at_t = Place::Finite(FqPoly::t());
        assert_eq!(local_valuation(&k, &f, &at_t), Ok(2));
        assert_eq!(local_valuation(&k, &f, &Place::Infinity), Ok(-2));
    }

    #[test]
    fn zero_function_rejected() {
        let k = f5();
        assert_eq!(
            local_valuation(&k, &RatFunc::zero(), &Place::Infinity),
            Err(PlaceError::ZeroFunction)
        );
    }

    #[test]
    fn product_formula_for_factored_poly() {
        let k = f5();
        // t^3 - t factors into linear places; check sum val * deg = 0
        let f = RatFunc::from_poly(FqPoly::from_coeffs(vec![0, 4, 0, 1]));
        let mut total = 0i64;
        for v in places_up_to(&k, 3) {
            total += local_valuation(&k, &f, &v).unwrap() * v.degree() as i64;
        }
        assert_eq!(total, 0);
    }

    #[test]
    fn product_formula_random_functions() {
        use rand::{Rng, SeedableRng};
        let k = f5();
        let places = places_up_to(&k, 6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let dn = rng.gen_range(0..4usize);
            let dd = rng.gen_range(0..4usize);
            let num = FqPoly::from_coeffs(
                (0..=dn).map(|i| if i == dn { rng.gen_range(1..5) } else { rng.gen_range(0..5) }).collect(),
            );
            let den = FqPoly::from_coeffs(
                (0..=dd).map(|i| if i == dd { rng.gen_range(1..5) } else { rng.gen_range(0..5) }).collect(),
            );
            if num.is_zero() || den.is_zero() {
                continue;
            }
            let f = k.rf(num, den);
            if f.is_zero() {
                continue;
            }
            let mut total = 0i64;
            for v in &places {
                total += local_valuation(&k, &f, v).unwrap() * v.degree() as i64;
            }
            // all zeros and poles have degree <= 4 < 6, so the sum is complete
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn residue_simple_cases() {
        let k = f5();
        // (t+1) at place t -> 1
        let f = RatFunc::from_poly(FqPoly::from_coeffs(vec![1, 1]));
        let at_t = Place::Finite(FqPoly::t());
        let r = residue(&k, &f, &at_t).unwrap();
        assert_eq!(r.0, vec![1]);
        // 1/t at infinity -> 0
        let g = k.rf(FqPoly::one(), FqPoly::t());
        let r = residue(&k, &g, &Place::Infinity).unwrap();
        assert!(r.0.iter().all(|&c| c == 0));
        // t at infinity is a pole
        assert_eq!(
            residue(&k, &RatFunc::from_poly(FqPoly::t()), &Place::Infinity),
            Err(PlaceError::Pole)
        );
    }

    #[test]
    fn residue_is_polynomial_remainder_at_quadratic_place() {
        let k = f5();
        let pi = FqPoly::from_coeffs(vec![2, 0, 1]); // t^2 + 2, irreducible
        let v = Place::Finite(pi.clone());
        // residue of f = t^2 + 1 should equal remainder -1 = 4 evaluated at
        // the root: t^2 + 1 = (t^2 + 2) - 1
        let f = RatFunc::from_poly(FqPoly::from_coeffs(vec![1, 0, 1]));
        let r = residue(&k, &f, &v).unwrap();
        assert_eq!(r.0[0], 4);
        assert!(r.0[1..].iter().all(|&c| c == 0));
        // ring homomorphism on a product
        let g = RatFunc::from_poly(FqPoly::from_coeffs(vec![3, 1]));
        let fg = k.rmul(&f, &g);
        let rf_ = ResidueField::new(&k, &v);
        let rr = residue(&k, &fg, &v).unwrap();
        let prod = rf_.field.mul(&r, &residue(&k, &g, &v).unwrap());
        assert_eq!(rr, prod);
    }
}
