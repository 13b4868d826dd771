use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{sign_of, IntPoly, RatPoly};
use crate::error::{Error, Result};

/// Interval endpoint: a rational number or ±∞.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    NegInf,
    Finite(#[serde(with = "rational_serde")] BigRational),
    PosInf,
}

mod rational_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        r: &BigRational,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&crate::exactmath::rational_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::exactmath::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

impl Endpoint {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Endpoint::Finite(r) => Some(r),
            _ => None,
        }
    }
}

/// Open interval with rational or infinite endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl OpenInterval {
    pub fn all_reals() -> Self {
        OpenInterval {
            lo: Endpoint::NegInf,
            hi: Endpoint::PosInf,
        }
    }

    pub fn bounded(lo: BigRational, hi: BigRational) -> Self {
        OpenInterval {
            lo: Endpoint::Finite(lo),
            hi: Endpoint::Finite(hi),
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = match &self.lo {
            Endpoint::NegInf => true,
            Endpoint::Finite(l) => x > l,
            Endpoint::PosInf => false,
        };
        let below = match &self.hi {
            Endpoint::PosInf => true,
            Endpoint::Finite(h) => x < h,
            Endpoint::NegInf => false,
        };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Endpoint::Finite(l), Endpoint::Finite(h)) => l >= h,
            (Endpoint::NegInf, Endpoint::NegInf) => true,
            (Endpoint::PosInf, _) => true,
            (_, Endpoint::NegInf) => true,
            _ => false,
        }
    }

    /// Width for bounded intervals.
    pub fn width(&self) -> Option<BigRational> {
        match (&self.lo, &self.hi) {
            (Endpoint::Finite(l), Endpoint::Finite(h)) => Some(h - l),
            _ => None,
        }
    }

    /// A canonical rational sample point inside the interval: the midpoint for
    /// bounded cells, one unit beyond the finite end for unbounded ones.
    pub fn sample_point(&self) -> BigRational {
        let one = BigRational::from(BigInt::from(1));
        match (&self.lo, &self.hi) {
            (Endpoint::Finite(l), Endpoint::Finite(h)) => (l + h) / BigRational::from(BigInt::from(2)),
            (Endpoint::NegInf, Endpoint::Finite(h)) => h - one,
            (Endpoint::Finite(l), Endpoint::PosInf) => l + one,
            _ => BigRational::zero(),
        }
    }

    /// Scale both endpoints by a positive rational factor.
    pub fn scale(&self, factor: &BigRational) -> OpenInterval {
        assert!(factor.is_positive());
        let map = |e: &Endpoint| match e {
            Endpoint::Finite(r) => Endpoint::Finite(r * factor),
            other => other.clone(),
        };
        OpenInterval {
            lo: map(&self.lo),
            hi: map(&self.hi),
        }
    }
}

impl std::fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side = |e: &Endpoint| match e {
            Endpoint::NegInf => "-inf".to_string(),
            Endpoint::PosInf => "inf".to_string(),
            Endpoint::Finite(r) => crate::exactmath::rational_string(r),
        };
        write!(f, "({}, {})", side(&self.lo), side(&self.hi))
    }
}

/// Squarefree part P / gcd(P, P'), primitive with positive leading coefficient.
pub fn squarefree_part(p: &IntPoly) -> Result<IntPoly> {
    if p.is_zero() {
        return Err(Error::invalid("squarefree_part: zero polynomial"));
    }
    if p.degree() == Some(0) {
        return Ok(IntPoly::constant(BigInt::from(1)));
    }
    let g = p.gcd(&p.derivative());
    let q = p
        .exact_div(&g)
        .or_else(|| {
            // gcd is defined up to content; retry with the primitive part.
            p.exact_div(&g.primitive_part())
        })
        .expect("gcd must divide the polynomial");
    Ok(q.primitive_part())
}

/// Sturm chain of a squarefree polynomial, with primitive-part normalization
/// (each step scaled by a positive constant, which preserves signs).
fn sturm_chain(s0: &IntPoly) -> Vec<IntPoly> {
    let mut chain = vec![s0.clone(), s0.derivative()];
    while let Some(last) = chain.last() {
        if last.is_zero() || last.degree() == Some(0) {
            break;
        }
        let prev = &chain[chain.len() - 2];
        let lc = last.leading_coeff().unwrap();
        let delta = prev.degree().unwrap() - last.degree().unwrap();
        let mut r = prev.pseudo_rem(last);
        // prem scales by lc^(delta+1); flip back when that factor is negative
        // so r equals (prev mod last) times a positive constant.
        if lc.is_negative() && (delta + 1) % 2 == 1 {
            r = r.neg();
        }
        if r.is_zero() {
            break;
        }
        chain.push(r.div_content().neg());
    }
    chain
}

#[derive(Clone, Copy)]
enum Place<'a> {
    NegInf,
    At(&'a BigRational),
    PosInf,
}

fn sign_at(p: &IntPoly, place: Place) -> i8 {
    match place {
        Place::At(x) => p.sign_at_rational(x),
        Place::PosInf => p.leading_coeff().map(|c| sign_of(c)).unwrap_or(0),
        Place::NegInf => {
            let d = match p.degree() {
                None => return 0,
                Some(d) => d,
            };
            let s = p.leading_coeff().map(|c| sign_of(c)).unwrap_or(0);
            if d % 2 == 1 {
                -s
            } else {
                s
            }
        }
    }
}

fn sign_changes(chain: &[IntPoly], place: Place) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| sign_at(p, place))
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of P in the open interval (all of ℝ when
/// `range` is None), by Sturm's theorem on the squarefree part.
pub fn real_root_count(p: &IntPoly, range: Option<&OpenInterval>) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::invalid("real_root_count: zero polynomial"));
    }
    if p.degree() == Some(0) {
        return Ok(0);
    }
    let s0 = squarefree_part(p)?;
    if s0.degree() == Some(0) {
        return Ok(0);
    }
    let chain = sturm_chain(&s0);
    let count_half_open = |lo: Place, hi: Place| -> usize {
        // V(lo) - V(hi) counts distinct roots in (lo, hi].
        sign_changes(&chain, lo) - sign_changes(&chain, hi)
    };
    let all = OpenInterval::all_reals();
    let range = range.unwrap_or(&all);
    if range.is_empty() {
        return Ok(0);
    }
    let lo = match &range.lo {
        Endpoint::NegInf => Place::NegInf,
        Endpoint::Finite(r) => Place::At(r),
        Endpoint::PosInf => return Ok(0),
    };
    let (hi, hi_is_root) = match &range.hi {
        Endpoint::PosInf => (Place::PosInf, false),
        Endpoint::Finite(r) => (Place::At(r), s0.sign_at_rational(r) == 0),
        Endpoint::NegInf => return Ok(0),
    };
    let mut count = count_half_open(lo, hi);
    if hi_is_root {
        count -= 1;
    }
    Ok(count)
}

/// real_root_count for rational polynomials (scaling by the positive common
/// denominator does not change the roots).
pub fn real_root_count_rat(p: &RatPoly, range: Option<&OpenInterval>) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::invalid("real_root_count: zero polynomial"));
    }
    let (ip, _) = p.clear_denominators();
    real_root_count(&ip, range)
}
