//! Exact univariate polynomial arithmetic over the integers, rationals, and
//! prime fields: resultants, discriminants, Sturm sequences, and finite-field
//! irreducibility / factor-degree analysis.

mod fppoly;
mod resultant;
mod sturm;

pub use fppoly::{fp_distinct_linear_split, fp_factor_degrees, fp_is_irreducible, FpPoly};
pub use resultant::{discriminant, discriminant_rat, resultant_int, resultant_rat};
pub use sturm::{real_root_count, real_root_count_rat, squarefree_part, Endpoint, OpenInterval};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense univariate polynomial with exact integer coefficients in ascending
/// degree order. The zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map(Zero::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// x - root
    pub fn linear(root: BigInt) -> Self {
        Self::new(vec![-root, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    /// Exact sign of the value at a rational point, via the homogenized
    /// integer form sum c_i * u^i * v^(d-i) for x = u/v with v > 0.
    pub fn sign_at_rational(&self, x: &BigRational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let d = self.degree().unwrap();
        let u = x.numer();
        let v = x.denom(); // > 0 by normalization
        let mut acc = BigInt::zero();
        let mut vpow = BigInt::one();
        let mut upows = Vec::with_capacity(d + 1);
        let mut up = BigInt::one();
        for _ in 0..=d {
            upows.push(up.clone());
            up *= u;
        }
        for i in (0..=d).rev() {
            acc += &self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero) * &upows[i] * &vpow;
            if i > 0 {
                vpow *= v;
            }
        }
        sign_of(&acc)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &IntPoly) -> IntPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn mul_scalar(&self, s: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Content: gcd of coefficients (≥ 0; 0 only for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&c.abs()))
    }

    /// Divide out the (positive) content, preserving the sign pattern.
    pub fn div_content(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let c = self.content();
        IntPoly::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().unwrap().is_negative() {
            c = -c;
        }
        IntPoly::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Pseudo-remainder: lc(divisor)^(deg a - deg b + 1) * a  mod  b.
    /// Requires deg a ≥ deg b; returns a clone otherwise.
    pub fn pseudo_rem(&self, divisor: &IntPoly) -> IntPoly {
        assert!(!divisor.is_zero(), "pseudo_rem by zero polynomial");
        let db = divisor.degree().unwrap();
        let lc = divisor.leading_coeff().unwrap().clone();
        let mut r = self.clone();
        let da = match r.degree() {
            Some(d) if d >= db => d,
            _ => return r,
        };
        let mut steps = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let coef = r.leading_coeff().unwrap().clone();
            // r = lc * r - coef * x^(dr-db) * divisor
            let mut shifted = vec![BigInt::zero(); dr - db];
            shifted.extend(divisor.coeffs.iter().map(|c| c * &coef));
            r = r.mul_scalar(&lc).sub(&IntPoly::new(shifted));
            steps -= 1;
        }
        // Keep the scaling exactly lc^(da-db+1) regardless of degree drops.
        for _ in 0..steps {
            r = r.mul_scalar(&lc);
        }
        r
    }

    /// Exact division; None when rhs does not divide self exactly.
    pub fn exact_div(&self, rhs: &IntPoly) -> Option<IntPoly> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let da = self.degree().unwrap();
        let db = rhs.degree().unwrap();
        if da < db {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); da - db + 1];
        let lc = rhs.leading_coeff().unwrap();
        for i in (0..q.len()).rev() {
            let top = rem[i + db].clone();
            if top.is_zero() {
                continue;
            }
            let (qc, r) = top.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in rhs.coeffs.iter().enumerate() {
                rem[i + j] -= &qc * c;
            }
            q[i] = qc;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::new(q))
    }

    /// Integer polynomial gcd, normalized to positive leading coefficient,
    /// with content gcd(content(a), content(b)).
    pub fn gcd(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return rhs.primitive_part().mul_scalar(&rhs.content());
        }
        if rhs.is_zero() {
            return self.primitive_part().mul_scalar(&self.content());
        }
        let cont = self.content().gcd(&rhs.content());
        let mut a = self.primitive_part();
        let mut b = rhs.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part().mul_scalar(&cont)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from(c.clone()))
                .collect(),
        )
    }
}

impl std::fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntPoly[{}]", poly_display(&self.coeffs))
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", poly_display(&self.coeffs))
    }
}

fn poly_display<T: std::fmt::Display + Zero>(coeffs: &[T]) -> String {
    if coeffs.is_empty() {
        return "0".into();
    }
    let mut parts = vec![];
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let term = match i {
            0 => format!("{c}"),
            1 => format!("({c})*x"),
            _ => format!("({c})*x^{i}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

// Polynomials serialize as JSON arrays of coefficient strings in ascending
// degree order (strings, not numbers, to avoid 64-bit overflow in consumers).
impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let strings: Vec<String> = Vec::deserialize(deserializer)?;
        let coeffs = strings
            .iter()
            .map(|s| s.parse::<BigInt>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(IntPoly::new(coeffs))
    }
}

/// Dense univariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map(Zero::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// x - root
    pub fn linear(root: BigRational) -> Self {
        Self::new(vec![-root, BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn mul_scalar(&self, s: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Antiderivative with constant term 0.
    pub fn integral(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + 1] = c / BigRational::from(BigInt::from(i + 1));
        }
        RatPoly::new(out)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Conversion to IntPoly, permitted only when all denominators are 1.
    pub fn to_int_poly(&self) -> Option<IntPoly> {
        if !self.is_integral() {
            return None;
        }
        Some(IntPoly::new(
            self.coeffs.iter().map(|c| c.numer().clone()).collect(),
        ))
    }

    /// Clear denominators: returns (k * self as IntPoly, k) with k > 0 minimal.
    pub fn clear_denominators(&self) -> (IntPoly, BigInt) {
        let mut k = BigInt::one();
        for c in &self.coeffs {
            k = k.lcm(c.denom());
        }
        let ip = IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| (c * BigRational::from(k.clone())).to_integer())
                .collect(),
        );
        (ip, k)
    }
}

impl std::fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RatPoly[{}]", poly_display(&self.coeffs))
    }
}

impl std::fmt::Display for RatPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", poly_display(&self.coeffs))
    }
}

/// Product of (x - r) over the given roots, times a scalar.
pub fn rat_poly_from_roots(scale: &BigRational, roots: &[BigRational]) -> RatPoly {
    let mut acc = RatPoly::constant(scale.clone());
    for r in roots {
        acc = acc.mul(&RatPoly::linear(r.clone()));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn construction_trims_leading_zeros() {
        let q = p(&[1, 2, 0, 0]);
        assert_eq!(q.degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn arithmetic_basics() {
        let a = p(&[1, 1]); // 1 + x
        let b = p(&[-1, 1]); // -1 + x
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(a.add(&b), p(&[0, 2]));
        assert_eq!(p(&[-1, 0, 1]).derivative(), p(&[0, 2]));
    }

    #[test]
    fn eval_and_sign() {
        let q = p(&[-2, 0, 1]); // x^2 - 2
        assert_eq!(q.eval(&BigInt::from(3)), BigInt::from(7));
        let half = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(q.sign_at_rational(&half), 1); // 9/4 - 2 > 0
        let x = BigRational::new(BigInt::from(7), BigInt::from(5));
        assert_eq!(q.sign_at_rational(&x), -1); // 49/25 - 2 < 0
    }

    #[test]
    fn exact_division_and_gcd() {
        let a = p(&[-1, 0, 1]); // (x-1)(x+1)
        let b = p(&[1, 1]);
        assert_eq!(a.exact_div(&b).unwrap(), p(&[-1, 1]));
        assert!(p(&[1, 0, 1]).exact_div(&b).is_none());
        let g = a.mul(&p(&[2, 2])).gcd(&p(&[2, 2]));
        assert_eq!(g, p(&[2, 2]));
    }

    #[test]
    fn pseudo_rem_matches_definition() {
        // prem(a, b) = lc(b)^(da-db+1) a mod b, checked against rational division.
        let a = p(&[3, -2, 0, 5, 1]);
        let b = p(&[1, 4, 3]);
        let r = a.pseudo_rem(&b);
        // Rational check: a*lc^3 - q*b should equal r for some polynomial q.
        let scaled = a.mul_scalar(&BigInt::from(27)); // 3^(4-2+1)
        let diff = scaled.sub(&r);
        // diff must be divisible by b
        assert!(diff.exact_div(&b).is_some());
    }

    #[test]
    fn rational_roundtrip() {
        let q = RatPoly::new(vec![
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::from(BigInt::from(3)),
        ]);
        let (ip, k) = q.clear_denominators();
        assert_eq!(k, BigInt::from(2));
        assert_eq!(ip, p(&[1, 6]));
        assert!(q.to_int_poly().is_none());
        assert_eq!(q.mul_scalar(&BigRational::from(BigInt::from(2)))
            .to_int_poly()
            .unwrap(), p(&[1, 6]));
    }

    #[test]
    fn serde_coefficients_as_strings() {
        let q = p(&[5, -3, 1]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"["5","-3","1"]"#);
        let back: IntPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }
}
