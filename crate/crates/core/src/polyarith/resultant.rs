use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{IntPoly, RatPoly};
use crate::error::{Error, Result};

/// Exact quotient, asserting divisibility (all divisions in the subresultant
/// scheme are exact by construction).
fn exact_quot(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (q, r) = num_integer::Integer::div_rem(a, b);
    debug_assert!(r.is_zero(), "non-exact division in subresultant PRS");
    q
}

fn poly_div_exact_scalar(p: &IntPoly, s: &BigInt) -> IntPoly {
    IntPoly::new(p.coeffs().iter().map(|c| exact_quot(c, s)).collect())
}

/// Resultant of two nonzero integer polynomials via the subresultant
/// polynomial remainder sequence (no root extraction, controlled growth).
pub fn resultant_int(a: &IntPoly, b: &IntPoly) -> Result<BigInt> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("resultant: zero polynomial"));
    }
    let (mut a, mut b, mut sign) = {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        if da < db {
            let s = if (da * db) % 2 == 1 { -1 } else { 1 };
            (b.clone(), a.clone(), BigInt::from(s))
        } else {
            (a.clone(), b.clone(), BigInt::one())
        }
    };

    if b.degree() == Some(0) {
        let da = a.degree().unwrap() as u32;
        return Ok(sign * b.leading_coeff().unwrap().pow(da));
    }

    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            // Nonconstant common factor: the resultant vanishes (db > 0 here).
            return Ok(BigInt::zero());
        }
        a = b;
        // b = r / (g * h^delta)
        let denom = &g * h.pow(delta);
        b = poly_div_exact_scalar(&r, &denom);
        g = a.leading_coeff().unwrap().clone();
        // h = h^(1-delta) * g^delta
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            if delta == 1 {
                num
            } else {
                exact_quot(&num, &h.pow(delta - 1))
            }
        };
        if b.degree() == Some(0) {
            let da = a.degree().unwrap() as u32;
            // res = sign * lc(b)^da / h^(da - 1)
            let num = b.leading_coeff().unwrap().pow(da);
            let res = if da == 0 {
                num
            } else {
                exact_quot(&num, &h.pow(da - 1))
            };
            return Ok(sign * res);
        }
    }
}

/// Resultant over the rationals, by clearing denominators:
/// Res(cP, Q) = c^deg(Q) Res(P, Q).
pub fn resultant_rat(p: &RatPoly, q: &RatPoly) -> Result<BigRational> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::invalid("resultant: zero polynomial"));
    }
    let (pi, pk) = p.clear_denominators();
    let (qi, qk) = q.clear_denominators();
    let raw = resultant_int(&pi, &qi)?;
    let scale = BigRational::from(pk.pow(q.degree().unwrap() as u32))
        * BigRational::from(qk.pow(p.degree().unwrap() as u32));
    Ok(BigRational::from(raw) / scale)
}

/// Discriminant of a monic integer polynomial of degree ≥ 2:
/// (-1)^(n(n-1)/2) * Res(P, P').
pub fn discriminant(p: &IntPoly) -> Result<BigInt> {
    let n = p
        .degree()
        .ok_or_else(|| Error::invalid("discriminant: zero polynomial"))?;
    if n < 2 {
        return Err(Error::invalid("discriminant: degree must be ≥ 2"));
    }
    if !p.is_monic() {
        return Err(Error::invalid("discriminant: polynomial must be monic"));
    }
    let dp = p.derivative();
    if dp.is_zero() {
        return Ok(BigInt::zero());
    }
    let res = resultant_int(p, &dp)?;
    let flip = (n * (n - 1) / 2) % 2 == 1;
    Ok(if flip { -res } else { res })
}

/// Discriminant of a monic rational polynomial (used by the identity checks
/// when coefficients are not yet known to be integral).
pub fn discriminant_rat(p: &RatPoly) -> Result<BigRational> {
    let n = p
        .degree()
        .ok_or_else(|| Error::invalid("discriminant: zero polynomial"))?;
    if n < 2 {
        return Err(Error::invalid("discriminant: degree must be ≥ 2"));
    }
    if !p.is_monic() {
        return Err(Error::invalid("discriminant: polynomial must be monic"));
    }
    let dp = p.derivative();
    let res = resultant_rat(p, &dp)?;
    let flip = (n * (n - 1) / 2) % 2 == 1;
    Ok(if flip { -res } else { res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::IntPoly;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    /// Naive resultant through the Sylvester-style product over small roots is
    /// impractical; instead check against direct evaluation identities.
    #[test]
    fn linear_cases() {
        // Res(x-2, x-5) = Q(2) = -3
        assert_eq!(
            resultant_int(&p(&[-2, 1]), &p(&[-5, 1])).unwrap(),
            BigInt::from(-3)
        );
        // Res(x^2+1, x) = product of x over roots ±i = 1
        assert_eq!(resultant_int(&p(&[1, 0, 1]), &p(&[0, 1])).unwrap(), BigInt::one());
        // Res(x^2-1, x^2-4) = (1-4)(1-4) = 9
        assert_eq!(
            resultant_int(&p(&[-1, 0, 1]), &p(&[-4, 0, 1])).unwrap(),
            BigInt::from(9)
        );
    }

    #[test]
    fn constant_and_swap() {
        assert_eq!(resultant_int(&p(&[3]), &p(&[0, 0, 1])).unwrap(), BigInt::from(9));
        assert_eq!(resultant_int(&p(&[0, 0, 1]), &p(&[3])).unwrap(), BigInt::from(9));
        // Swap sign: Res(P,Q) = (-1)^(deg P deg Q) Res(Q,P)
        let a = p(&[1, 2, 1]); // (x+1)^2
        let b = p(&[-2, 0, 0, 1]); // x^3 - 2
        let ab = resultant_int(&a, &b).unwrap();
        let ba = resultant_int(&b, &a).unwrap();
        assert_eq!(ab, ba); // deg product even
    }

    #[test]
    fn shared_root_gives_zero() {
        let a = p(&[-1, 0, 1]); // (x-1)(x+1)
        let b = p(&[-1, 1]).mul(&p(&[3, 1])); // (x-1)(x+3)
        assert_eq!(resultant_int(&a, &b).unwrap(), BigInt::zero());
    }

    #[test]
    fn discriminant_closed_forms() {
        // x^2 + 3x + 1 -> b^2 - 4c = 5
        assert_eq!(discriminant(&p(&[1, 3, 1])).unwrap(), BigInt::from(5));
        // x^3 - x -> -4p^3 - 27q^2 with p=-1, q=0 gives 4
        assert_eq!(discriminant(&p(&[0, -1, 0, 1])).unwrap(), BigInt::from(4));
        // x^2 -> 0
        assert_eq!(discriminant(&p(&[0, 0, 1])).unwrap(), BigInt::zero());
    }

    #[test]
    fn discriminant_rejects_bad_input() {
        assert!(discriminant(&p(&[1, 2])).is_err()); // degree 1
        assert!(discriminant(&p(&[1, 0, 2])).is_err()); // not monic
    }

    #[test]
    fn multiplicativity_small_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
                let deg = rng.gen_range(1..=5usize);
                let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
                if c[deg] == 0 {
                    c[deg] = 1;
                }
                IntPoly::from_i64(&c)
            };
            let a = rand_poly(&mut rng);
            let q1 = rand_poly(&mut rng);
            let q2 = rand_poly(&mut rng);
            let lhs = resultant_int(&a, &q1.mul(&q2)).unwrap();
            let rhs = resultant_int(&a, &q1).unwrap() * resultant_int(&a, &q2).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
