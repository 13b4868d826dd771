use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use super::IntPoly;
use crate::error::{Error, Result};
use crate::exactmath::mod_inverse;

/// Polynomial over the prime field F_p, coefficients reduced into [0, p).
#[derive(Clone, PartialEq, Eq)]
pub struct FpPoly {
    modulus: BigInt,
    coeffs: Vec<BigInt>,
}

impl std::fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FpPoly(mod {}; {:?})", self.modulus, self.coeffs)
    }
}

impl FpPoly {
    pub fn new(modulus: BigInt, coeffs: Vec<BigInt>) -> Self {
        let mut reduced: Vec<BigInt> = coeffs.iter().map(|c| c.mod_floor(&modulus)).collect();
        while reduced.last().map(Zero::is_zero).unwrap_or(false) {
            reduced.pop();
        }
        FpPoly {
            modulus,
            coeffs: reduced,
        }
    }

    pub fn from_int_poly(p: &IntPoly, modulus: &BigInt) -> Self {
        Self::new(modulus.clone(), p.coeffs().to_vec())
    }

    pub fn zero(modulus: BigInt) -> Self {
        FpPoly {
            modulus,
            coeffs: vec![],
        }
    }

    pub fn constant(modulus: BigInt, c: BigInt) -> Self {
        Self::new(modulus, vec![c])
    }

    pub fn x(modulus: BigInt) -> Self {
        Self::new(modulus, vec![BigInt::zero(), BigInt::one()])
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * x + c).mod_floor(&self.modulus);
        }
        acc
    }

    pub fn add(&self, rhs: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        FpPoly::new(
            self.modulus.clone(),
            (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        )
    }

    pub fn sub(&self, rhs: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        FpPoly::new(
            self.modulus.clone(),
            (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        )
    }

    pub fn mul(&self, rhs: &FpPoly) -> FpPoly {
        if self.is_zero() || rhs.is_zero() {
            return FpPoly::zero(self.modulus.clone());
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
        FpPoly::new(self.modulus.clone(), out)
    }

    pub fn mul_scalar(&self, s: &BigInt) -> FpPoly {
        FpPoly::new(
            self.modulus.clone(),
            self.coeffs.iter().map(|c| c * s).collect(),
        )
    }

    pub fn derivative(&self) -> FpPoly {
        if self.coeffs.len() <= 1 {
            return FpPoly::zero(self.modulus.clone());
        }
        FpPoly::new(
            self.modulus.clone(),
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Remainder of self divided by a nonzero divisor.
    pub fn rem(&self, divisor: &FpPoly) -> FpPoly {
        assert!(!divisor.is_zero());
        let db = divisor.degree().unwrap();
        let inv = mod_inverse(divisor.leading_coeff().unwrap(), &self.modulus)
            .expect("leading coefficient invertible mod prime");
        let mut r = self.coeffs.clone();
        while r.len() > db {
            let top = r.last().unwrap().clone();
            if top.is_zero() {
                r.pop();
                continue;
            }
            let k = r.len() - 1 - db;
            let factor = (&top * &inv).mod_floor(&self.modulus);
            for (j, c) in divisor.coeffs.iter().enumerate() {
                let idx = k + j;
                r[idx] = (&r[idx] - &factor * c).mod_floor(&self.modulus);
            }
            while r.last().map(Zero::is_zero).unwrap_or(false) {
                r.pop();
            }
        }
        FpPoly::new(self.modulus.clone(), r)
    }

    /// Exact quotient (panics when division is not exact).
    pub fn div_exact(&self, divisor: &FpPoly) -> FpPoly {
        assert!(!divisor.is_zero());
        let db = divisor.degree().unwrap();
        let inv = mod_inverse(divisor.leading_coeff().unwrap(), &self.modulus)
            .expect("leading coefficient invertible mod prime");
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); self.coeffs.len().saturating_sub(db)];
        while r.len() > db {
            let top = r.last().unwrap().clone();
            let k = r.len() - 1 - db;
            if !top.is_zero() {
                let factor = (&top * &inv).mod_floor(&self.modulus);
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    let idx = k + j;
                    r[idx] = (&r[idx] - &factor * c).mod_floor(&self.modulus);
                }
                q[k] = factor;
            }
            while r.last().map(Zero::is_zero).unwrap_or(false) {
                r.pop();
            }
        }
        assert!(
            r.iter().all(Zero::is_zero),
            "div_exact: division not exact"
        );
        FpPoly::new(self.modulus.clone(), q)
    }

    pub fn monic(&self) -> FpPoly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = mod_inverse(lc, &self.modulus).expect("invertible");
                self.mul_scalar(&inv)
            }
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, rhs: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// self^e mod m, with a BigInt exponent.
    pub fn pow_mod(&self, e: &BigInt, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut acc = FpPoly::constant(self.modulus.clone(), BigInt::one());
        let mut bits = e.clone();
        while bits > BigInt::zero() {
            if bits.is_odd() {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            bits >>= 1;
        }
        acc
    }
}

/// x^(p^d) mod f, by iterating the Frobenius power d times.
fn frobenius_power(f: &FpPoly, d: usize) -> FpPoly {
    let p = f.modulus().clone();
    let mut acc = FpPoly::x(p.clone()).rem(f);
    for _ in 0..d {
        acc = acc.pow_mod(&p, f);
    }
    acc
}

/// Irreducibility over F_p: f (deg ≥ 1) is irreducible iff it shares no factor
/// with x^(p^d) - x for every d ≤ deg f / 2.
pub fn fp_is_irreducible(f: &FpPoly) -> bool {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if d == 1 {
        return true;
    }
    let x = FpPoly::x(f.modulus().clone());
    let mut xq = x.clone().rem(f);
    for _ in 1..=d / 2 {
        xq = xq.pow_mod(f.modulus(), f);
        let g = f.gcd(&xq.sub(&x));
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

/// Root extraction for a polynomial known to split into distinct linear
/// factors: equal-degree splitting with deterministic shifts (odd p).
fn split_roots(f: &FpPoly, out: &mut Vec<BigInt>) {
    let p = f.modulus().clone();
    match f.degree() {
        None | Some(0) => {}
        Some(1) => {
            let c0 = f.coeffs()[0].clone();
            let c1 = f.coeffs()[1].clone();
            let inv = mod_inverse(&c1, &p).expect("unit");
            out.push(((-c0) * inv).mod_floor(&p));
        }
        Some(_) => {
            let half = (&p - BigInt::one()) >> 1;
            let mut c = BigInt::zero();
            loop {
                // gcd(f, (x+c)^((p-1)/2) - 1) splits off the roots r with
                // r + c a nonzero quadratic residue.
                let shifted = FpPoly::new(p.clone(), vec![c.clone(), BigInt::one()]);
                let pow = shifted.pow_mod(&half, f);
                let g = f.gcd(&pow.sub(&FpPoly::constant(p.clone(), BigInt::one())));
                let dg = g.degree().unwrap_or(0);
                if dg > 0 && dg < f.degree().unwrap() {
                    let other = f.div_exact(&g);
                    split_roots(&g, out);
                    split_roots(&other, out);
                    return;
                }
                c += 1;
            }
        }
    }
}

/// If f splits into deg(f) distinct linear factors mod p, return the sorted
/// root list; None otherwise.
pub fn fp_distinct_linear_split(f: &FpPoly) -> Option<Vec<BigInt>> {
    let d = f.degree()?;
    if d == 0 {
        return None;
    }
    let p = f.modulus();
    if BigInt::from(d) > *p {
        return None; // more roots than field elements
    }
    let f = f.monic();
    // f splits into distinct linear factors iff f divides x^p - x.
    let xp = frobenius_power(&f, 1);
    let x = FpPoly::x(p.clone()).rem(&f);
    if xp != x {
        return None;
    }
    let mut roots = Vec::with_capacity(d);
    if p.to_u64().map(|v| v <= 1 << 20).unwrap_or(false) {
        // Small fields: direct scan.
        let pv = p.to_u64().unwrap();
        for r in 0..pv {
            let rv = BigInt::from(r);
            if f.eval(&rv).is_zero() {
                roots.push(rv);
            }
        }
    } else {
        split_roots(&f, &mut roots);
        roots.sort();
    }
    debug_assert_eq!(roots.len(), d);
    Some(roots)
}

/// Distinct-degree factorization: the multiset of irreducible factor degrees
/// (ascending). Input must be squarefree mod p.
pub fn fp_factor_degrees(f: &FpPoly) -> Result<Vec<usize>> {
    let d = f
        .degree()
        .ok_or_else(|| Error::invalid("fp_factor_degrees: zero polynomial"))?;
    if d == 0 {
        return Ok(vec![]);
    }
    let fm = f.monic();
    let sep = fm.gcd(&fm.derivative());
    if sep.degree() != Some(0) {
        return Err(Error::invalid(
            "fp_factor_degrees: input is not squarefree mod p",
        ));
    }
    let x = FpPoly::x(fm.modulus().clone());
    let mut degrees = vec![];
    let mut g = fm.clone();
    let mut xq = x.clone().rem(&fm);
    let mut dd = 0usize;
    while let Some(dg) = g.degree() {
        if dg == 0 {
            break;
        }
        dd += 1;
        if 2 * dd > dg {
            degrees.push(dg);
            break;
        }
        xq = xq.pow_mod(fm.modulus(), &fm);
        let factor = g.gcd(&xq.sub(&x));
        let df = factor.degree().unwrap_or(0);
        if df > 0 {
            debug_assert_eq!(df % dd, 0);
            for _ in 0..df / dd {
                degrees.push(dd);
            }
            g = g.div_exact(&factor);
        }
    }
    degrees.sort();
    debug_assert_eq!(degrees.iter().sum::<usize>(), d);
    Ok(degrees)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: i64, coeffs: &[i64]) -> FpPoly {
        FpPoly::new(
            BigInt::from(p),
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        )
    }

    #[test]
    fn irreducibility_examples() {
        assert!(fp_is_irreducible(&fp(3, &[1, 0, 1]))); // x^2+1 mod 3
        assert!(!fp_is_irreducible(&fp(5, &[1, 0, 1]))); // 2^2 = -1 mod 5
        assert!(fp_is_irreducible(&fp(7, &[1, 1]))); // degree one
    }

    #[test]
    fn irreducibility_vs_root_scan_for_cubics() {
        // Degree ≤ 3: irreducible iff no roots.
        for p in [3i64, 5, 7, 11, 13] {
            for c0 in 0..p.min(7) {
                for c1 in 0..p.min(7) {
                    for c2 in 0..p.min(7) {
                        let f = fp(p, &[c0, c1, c2, 1]);
                        let has_root = (0..p).any(|x| f.eval(&BigInt::from(x)).is_zero());
                        assert_eq!(fp_is_irreducible(&f), !has_root, "p={p} f={f:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn linear_split_examples() {
        // x^2 - 1 mod 5 -> [1, 4]
        assert_eq!(
            fp_distinct_linear_split(&fp(5, &[-1, 0, 1])),
            Some(vec![BigInt::from(1), BigInt::from(4)])
        );
        // x^2 mod 5: repeated factor
        assert_eq!(fp_distinct_linear_split(&fp(5, &[0, 0, 1])), None);
        // 2x^3 - 1 mod 7: scan x=0..6 shows no roots at all, so no full split
        let f = fp(7, &[-1, 0, 0, 2]);
        for x in 0..7 {
            assert!(!f.eval(&BigInt::from(x)).is_zero());
        }
        assert_eq!(fp_distinct_linear_split(&f), None);
    }

    #[test]
    fn split_with_large_prime_path() {
        // Force the gcd-splitting path with p above the scan threshold.
        let p = BigInt::from((1u64 << 21) + 17); // 2097169 is prime
        assert!(crate::exactmath::is_prime(&p));
        // (x-3)(x-5)(x-1000003 mod p)
        let roots = [BigInt::from(3), BigInt::from(5), BigInt::from(1_000_003)];
        let mut f = FpPoly::constant(p.clone(), BigInt::one());
        for r in &roots {
            f = f.mul(&FpPoly::new(p.clone(), vec![-r.clone(), BigInt::one()]));
        }
        let mut expect: Vec<BigInt> = roots.to_vec();
        expect.sort();
        assert_eq!(fp_distinct_linear_split(&f), Some(expect));
    }

    #[test]
    fn factor_degree_examples() {
        assert_eq!(fp_factor_degrees(&fp(5, &[1, 0, 1])).unwrap(), vec![1, 1]);
        assert_eq!(fp_factor_degrees(&fp(3, &[1, 0, 1])).unwrap(), vec![2]);
        assert_eq!(
            fp_factor_degrees(&fp(5, &[0, -1, 0, 1])).unwrap(),
            vec![1, 1, 1]
        );
        // Non-squarefree input rejected
        assert!(fp_factor_degrees(&fp(5, &[0, 0, 1])).is_err());
    }

    #[test]
    fn degrees_sum_and_irreducibility_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let p = [3i64, 5, 7, 11, 13, 17][rng.gen_range(0..6)];
            let deg = rng.gen_range(1..=6usize);
            let mut coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(0..p)).collect();
            coeffs[deg] = 1;
            let f = fp(p, &coeffs);
            let sep = f.gcd(&f.derivative());
            if sep.degree() != Some(0) {
                continue;
            }
            let degs = fp_factor_degrees(&f).unwrap();
            assert_eq!(degs.iter().sum::<usize>(), deg);
            assert_eq!(fp_is_irreducible(&f), degs == vec![deg]);
        }
    }
}
