//! Parameter searches and congruence assembly: the auxiliary prime pair
//! (p0, p1), a parameter tuple with pairwise-distinct critical values, the
//! separating prime p2, the per-index congruences, the admissible class for
//! the constant term, and the signature-controlling direction with its
//! certified interval.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{crt_solve, is_prime, mod_inverse, primes_up_to, sieve_primes};
use crate::family::{
    build_p, critical_values, disc_linear_factorization, to_rationals, FamilyParams,
};
use crate::polyarith::{
    fp_distinct_linear_split, fp_is_irreducible, real_root_count_rat, Endpoint, FpPoly, IntPoly,
    OpenInterval,
};

/// Auxiliary prime pair and the split derivative roots.
#[derive(Debug, Clone)]
pub struct EisensteinPair {
    pub p0: BigInt,
    pub p1: BigInt,
    pub r_poly: IntPoly,
    pub rprime_roots: Vec<BigInt>,
}

/// R(x) = x^n - p0^(n-1) x + p0.
pub fn eisenstein_poly(n: usize, p0: &BigInt) -> IntPoly {
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[0] = p0.clone();
    coeffs[1] = -p0.pow((n - 1) as u32);
    coeffs[n] = BigInt::one();
    IntPoly::new(coeffs)
}

fn prime_iter(limit_count: usize) -> Vec<u64> {
    // Enough primes for any desk-scale scan: extend the sieve until we have
    // the requested count.
    let mut bound = 1 << 14;
    loop {
        let primes = sieve_primes(bound);
        if primes.len() >= limit_count {
            return primes;
        }
        bound *= 2;
    }
}

/// Find (p0, p1): p0 the smallest prime not dividing n(n-1); p1 the smallest
/// prime outside S ∪ {2..n} such that R is irreducible mod p1 while R' splits
/// into n-1 distinct linear factors mod p1. `scan_limit` bounds the number of
/// candidate primes scanned for p1.
pub fn find_eisenstein_pair(
    n: usize,
    avoid: &BTreeSet<BigInt>,
    scan_limit: usize,
) -> Result<EisensteinPair> {
    if n < 2 {
        return Err(Error::invalid("find_eisenstein_pair: n must be ≥ 2"));
    }
    let n_big = BigInt::from(n);
    let nn1 = &n_big * BigInt::from(n - 1);
    let p0 = primes_up_to(1000)
        .into_iter()
        .map(BigInt::from)
        .find(|p| !(&nn1 % p).is_zero())
        .expect("a prime not dividing n(n-1) exists below 1000");

    let r_poly = eisenstein_poly(n, &p0);
    let rprime = r_poly.derivative();

    let candidates = prime_iter(scan_limit + n + avoid.len() + 8);
    let mut scanned = 0usize;
    for &p in &candidates {
        if scanned >= scan_limit {
            break;
        }
        let pb = BigInt::from(p);
        if p <= n as u64 || avoid.contains(&pb) {
            continue;
        }
        scanned += 1;
        let r_mod = FpPoly::from_int_poly(&r_poly, &pb);
        if r_mod.degree() != Some(n) || !fp_is_irreducible(&r_mod) {
            continue;
        }
        let rp_mod = FpPoly::from_int_poly(&rprime, &pb);
        if rp_mod.degree() != Some(n - 1) {
            continue;
        }
        if let Some(roots) = fp_distinct_linear_split(&rp_mod) {
            return Ok(EisensteinPair {
                p0,
                p1: pb,
                r_poly,
                rprime_roots: roots,
            });
        }
    }
    Err(Error::ScanExhausted {
        stage: "find_eisenstein_pair",
        detail: format!("no qualifying p1 among the first {scan_limit} admissible primes"),
    })
}

/// All n-1 critical values of the tuple, in the unscaled normalization.
fn unscaled_values(n: usize, a: &[BigRational]) -> Result<Vec<BigRational>> {
    let data = critical_values(n, a)?;
    Ok(data.unscaled_values(n))
}

fn pairwise_distinct(values: &[BigRational]) -> bool {
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if values[i] == values[j] {
                return false;
            }
        }
    }
    true
}

/// Find a rational tuple whose critical values are pairwise distinct
/// (verified exactly). Deterministic candidates first — critical points
/// (1, 2, ..., n-2, n-1+j) for j = 0, 1, ... — then seeded random increasing
/// tuples.
pub fn find_distinct_value_tuple(
    n: usize,
    attempts: usize,
    seed: u64,
) -> Result<Vec<BigRational>> {
    if n < 2 {
        return Err(Error::invalid("find_distinct_value_tuple: n must be ≥ 2"));
    }
    if n == 2 {
        return Ok(vec![BigRational::one()]);
    }
    let mut tried = 0usize;
    for j in 0.. {
        if tried >= attempts {
            break;
        }
        tried += 1;
        // critical points 1, 2, ..., n-2, (n-1+j): tuple (n, 2, ..., n-2, n-1+j)
        let mut a: Vec<BigRational> = Vec::with_capacity(n - 1);
        a.push(BigRational::from(BigInt::from(n)));
        for c in 2..=(n - 2) {
            a.push(BigRational::from(BigInt::from(c)));
        }
        a.push(BigRational::from(BigInt::from(n - 1 + j)));
        if pairwise_distinct(&unscaled_values(n, &a)?) {
            return Ok(a);
        }
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    while tried < attempts.max(1) * 4 {
        tried += 1;
        let mut points: Vec<i64> = Vec::with_capacity(n - 1);
        let mut cur = 1i64;
        for _ in 0..(n - 1) {
            points.push(cur);
            cur += rng.gen_range(1..=10);
        }
        let mut a: Vec<BigRational> = Vec::with_capacity(n - 1);
        a.push(BigRational::from(BigInt::from(points[0] * n as i64)));
        for &c in &points[1..] {
            a.push(BigRational::from(BigInt::from(c)));
        }
        if pairwise_distinct(&unscaled_values(n, &a)?) {
            return Ok(a);
        }
    }
    Err(Error::BudgetExhausted {
        stage: "find_distinct_value_tuple",
        detail: format!("no tuple with distinct critical values in {tried} attempts"),
    })
}

/// Reduce a rational mod p (denominator must be coprime to p).
fn reduce_rational(v: &BigRational, p: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(&v.denom().mod_floor(p), p)?;
    Some((v.numer() * inv).mod_floor(p))
}

/// Smallest prime outside S ∪ {2..n} ∪ {p1}, coprime to every denominator
/// involved, such that the critical values of the tuple have distinct
/// reductions mod p2.
pub fn find_p2(
    n: usize,
    a_prime: &[BigRational],
    avoid: &BTreeSet<BigInt>,
    p1: &BigInt,
    scan_limit: usize,
) -> Result<BigInt> {
    let values = unscaled_values(n, a_prime)?;
    if !pairwise_distinct(&values) {
        return Err(Error::invalid(
            "find_p2: critical values must be pairwise distinct",
        ));
    }
    let candidates = prime_iter(scan_limit + n + avoid.len() + 8);
    let mut scanned = 0usize;
    for &p in &candidates {
        if scanned >= scan_limit {
            break;
        }
        let pb = BigInt::from(p);
        if p <= n as u64 || avoid.contains(&pb) || &pb == p1 {
            continue;
        }
        scanned += 1;
        // Denominators of the tuple itself and of its critical values must be
        // units mod p2 for the reductions to be well-defined.
        let mut ok = true;
        let mut reductions = BTreeSet::new();
        for v in a_prime.iter().chain(values.iter()) {
            if (v.denom() % &pb).is_zero() {
                ok = false;
                break;
            }
        }
        if ok {
            for v in &values {
                match reduce_rational(v, &pb) {
                    Some(r) => {
                        if !reductions.insert(r) {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            return Ok(pb);
        }
    }
    Err(Error::ScanExhausted {
        stage: "find_p2",
        detail: format!("no separating prime among the first {scan_limit} admissible primes"),
    })
}

/// Per-index congruence classes for the parameter tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseCongruences {
    /// (residue, modulus) for each index 0..n-1 (index 0 is a_1).
    pub per_index: Vec<(BigInt, BigInt)>,
}

impl BaseCongruences {
    /// The representative of each class nearest to zero (used for quick
    /// verification probes).
    pub fn minimal_representatives(&self) -> Vec<BigInt> {
        self.per_index
            .iter()
            .map(|(r, m)| {
                let r = r.mod_floor(m);
                let alt = &r - m;
                if r.abs() <= alt.abs() {
                    r
                } else {
                    alt
                }
            })
            .collect()
    }

    /// Nearest member of class i to the target value.
    pub fn snap(&self, i: usize, target: &BigInt) -> BigInt {
        let (r, m) = &self.per_index[i];
        let k = (target - r).div_floor(m);
        let below = r + &k * m;
        let above = &below + m;
        if (target - &below).abs() <= (&above - target).abs() {
            below
        } else {
            above
        }
    }
}

/// Full set of auxiliary witnesses produced by the searches, re-verifiable.
#[derive(Debug, Clone)]
pub struct ParamCertificate {
    pub n: usize,
    pub avoid: BTreeSet<BigInt>,
    pub p0: BigInt,
    pub p1: BigInt,
    pub r_poly: IntPoly,
    pub rprime_roots: Vec<BigInt>,
    pub a_prime: Vec<BigRational>,
    pub p2: BigInt,
    /// Residue of the constant term mod p1 forcing irreducibility.
    pub b1: BigInt,
    /// Residue of the constant term at each prime of S ∪ {primes ≤ n}.
    pub b_p: BTreeMap<BigInt, BigInt>,
    /// Merged admissible class for the constant term.
    pub b_residue: BigInt,
    pub b_modulus: BigInt,
    /// n! * p1 * p2 * prod(S): the scale q must be ≡ 1 mod this.
    pub assembled_modulus: BigInt,
    pub base: BaseCongruences,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Assemble the per-index congruences: divisibility conditions, the root
/// assignment mod p1 (identity order, with a_1 ≡ n*root mod p1), and the
/// tuple reduction mod p2.
pub fn assemble_base_params(
    n: usize,
    avoid: &BTreeSet<BigInt>,
    pair: &EisensteinPair,
    a_prime: &[BigRational],
    p2: &BigInt,
) -> Result<BaseCongruences> {
    let n_big = BigInt::from(n);
    let p1 = &pair.p1;
    let mut per_index = Vec::with_capacity(n - 1);
    for i in 0..(n - 1) {
        let mut system: Vec<(BigInt, BigInt)> = vec![];
        if i == 0 {
            // a_1: divisible by n-1 and the primes of S not dividing n,
            // coprime to n (realized as ≡ 1 mod n), a_1/n ≡ root_1 mod p1.
            if n > 2 {
                system.push((BigInt::zero(), BigInt::from(n - 1)));
            }
            for p in avoid {
                if !(&n_big % p).is_zero() {
                    system.push((BigInt::zero(), p.clone()));
                }
            }
            system.push((BigInt::one(), n_big.clone()));
            let root = &pair.rprime_roots[0];
            system.push(((&n_big * root).mod_floor(p1), p1.clone()));
        } else {
            // a_i: divisible by n! and all primes of S, ≡ root_i mod p1.
            system.push((BigInt::zero(), factorial(n)));
            for p in avoid {
                system.push((BigInt::zero(), p.clone()));
            }
            system.push((pair.rprime_roots[i].mod_floor(p1), p1.clone()));
        }
        let ai_mod_p2 = reduce_rational(&a_prime[i], p2).ok_or_else(|| {
            Error::invalid("assemble_base_params: tuple denominator not invertible mod p2")
        })?;
        system.push((ai_mod_p2, p2.clone()));
        per_index.push(crt_solve(&system)?);
    }
    Ok(BaseCongruences { per_index })
}

/// The admissible congruence class for the constant term: ≡ 1 at every prime
/// of S ∪ {primes ≤ n}, and ≡ b1 mod p1 with b1 = p0 mod p1 (verified to make
/// the reduced polynomial irreducible; brute scan of the class fallback).
/// Returns (b1, merged residue, merged modulus).
pub fn b_congruence(
    n: usize,
    avoid: &BTreeSet<BigInt>,
    pair: &EisensteinPair,
    base: &BaseCongruences,
) -> Result<(BigInt, BigInt, BigInt)> {
    let p1 = &pair.p1;
    let a_min = base.minimal_representatives();
    let a_rat = to_rationals(&a_min);

    let candidate = pair.p0.mod_floor(p1);
    let verify = |b1: &BigInt| -> Result<bool> {
        let p = build_p(n, &a_rat, &BigRational::from(b1.clone()))?;
        let ip = p.to_int_poly().ok_or_else(|| {
            Error::invalid("b_congruence: assembled parameters must give integral coefficients")
        })?;
        Ok(fp_is_irreducible(&FpPoly::from_int_poly(&ip, p1)))
    };

    let mut b1 = None;
    if verify(&candidate)? {
        b1 = Some(candidate);
    } else {
        let limit = p1.to_u64().unwrap_or(0);
        for c in 0..limit {
            let cb = BigInt::from(c);
            if verify(&cb)? {
                b1 = Some(cb);
                break;
            }
        }
    }
    let b1 = b1.ok_or_else(|| Error::ScanExhausted {
        stage: "b_congruence",
        detail: "no residue mod p1 makes the reduction irreducible".into(),
    })?;

    let mut system = vec![(b1.clone(), p1.clone())];
    let mut residue_primes: BTreeSet<BigInt> = avoid.clone();
    for p in primes_up_to(n as u64) {
        residue_primes.insert(BigInt::from(p));
    }
    for p in &residue_primes {
        system.push((BigInt::one(), p.clone()));
    }
    let (residue, modulus) = crt_solve(&system)?;
    Ok((b1, residue, modulus))
}

/// Direct verification of the five structural conditions for a concrete
/// integer tuple (conditions (i)-(v) as assertions).
pub fn verify_conditions(
    n: usize,
    avoid: &BTreeSet<BigInt>,
    pair: &EisensteinPair,
    p2: &BigInt,
    a_prime: &[BigRational],
    b1: &BigInt,
    a: &[BigInt],
) -> Result<()> {
    let a_rat = to_rationals(a);
    // (i) integral coefficients
    let p0poly = build_p(n, &a_rat, &BigRational::zero())?;
    if !p0poly.is_integral() {
        return Err(Error::CertificationFailure(
            "condition (i): non-integral coefficients".into(),
        ));
    }
    // (v) pairwise coprime linear factors
    let system = disc_linear_factorization(n, a)?;
    if !system.is_pairwise_coprime() {
        return Err(Error::CertificationFailure(
            "condition (v): linear factors not pairwise coprime".into(),
        ));
    }
    // (ii)+(iii) for p ∈ S ∪ {primes ≤ n}: disc at b=1 not divisible by p
    let disc_at_1 = system.eval(&BigInt::one());
    let mut small = avoid.clone();
    for p in primes_up_to(n as u64) {
        small.insert(BigInt::from(p));
    }
    for p in &small {
        if disc_at_1.mod_floor(p).is_zero() {
            return Err(Error::CertificationFailure(format!(
                "condition (ii)/(iii): discriminant at b=1 divisible by {p}"
            )));
        }
    }
    // (b)-derived distinctness: critical points have distinct reductions mod p1
    let p1 = &pair.p1;
    let data = critical_values(n, &a_rat)?;
    let mut reds = BTreeSet::new();
    for pt in &data.critical_points {
        let r = reduce_rational(pt, p1).ok_or_else(|| {
            Error::CertificationFailure("critical point not reducible mod p1".into())
        })?;
        if !reds.insert(r) {
            return Err(Error::CertificationFailure(
                "critical points collide mod p1".into(),
            ));
        }
    }
    // (iv) irreducibility of the reduction at b1
    let pb1 = build_p(n, &a_rat, &BigRational::from(b1.clone()))?
        .to_int_poly()
        .expect("integral by (i)");
    if !fp_is_irreducible(&FpPoly::from_int_poly(&pb1, p1)) {
        return Err(Error::CertificationFailure(
            "condition (iv): reduction mod p1 not irreducible".into(),
        ));
    }
    // (c): congruence to the distinguished tuple mod p2
    for (ai, api) in a.iter().zip(a_prime.iter()) {
        let want = reduce_rational(api, p2).ok_or_else(|| {
            Error::CertificationFailure("tuple reduction mod p2 undefined".into())
        })?;
        if ai.mod_floor(p2) != want {
            return Err(Error::CertificationFailure(
                "condition (c): tuple not congruent mod p2".into(),
            ));
        }
    }
    Ok(())
}

/// Run every search and assemble the full certificate.
pub fn build_certificate(
    n: usize,
    avoid: &BTreeSet<BigInt>,
    scan_limit: usize,
    seed: u64,
) -> Result<ParamCertificate> {
    for p in avoid {
        if !is_prime(p) {
            return Err(Error::invalid(format!("avoid set contains non-prime {p}")));
        }
    }
    let pair = find_eisenstein_pair(n, avoid, scan_limit)?;
    let a_prime = find_distinct_value_tuple(n, 64, seed)?;
    let p2 = find_p2(n, &a_prime, avoid, &pair.p1, scan_limit)?;
    let base = assemble_base_params(n, avoid, &pair, &a_prime, &p2)?;
    let (b1, b_residue, b_modulus) = b_congruence(n, avoid, &pair, &base)?;

    let mut b_p = BTreeMap::new();
    let mut residue_primes: BTreeSet<BigInt> = avoid.clone();
    for p in primes_up_to(n as u64) {
        residue_primes.insert(BigInt::from(p));
    }
    for p in residue_primes {
        b_p.insert(p, BigInt::one());
    }

    let mut assembled_modulus = factorial(n) * &pair.p1 * &p2;
    for p in avoid {
        assembled_modulus *= p;
    }

    Ok(ParamCertificate {
        n,
        avoid: avoid.clone(),
        p0: pair.p0.clone(),
        p1: pair.p1.clone(),
        r_poly: pair.r_poly.clone(),
        rprime_roots: pair.rprime_roots.clone(),
        a_prime,
        p2,
        b1,
        b_p,
        b_residue,
        b_modulus,
        assembled_modulus,
        base,
    })
}

impl ParamCertificate {
    pub fn eisenstein_pair(&self) -> EisensteinPair {
        EisensteinPair {
            p0: self.p0.clone(),
            p1: self.p1.clone(),
            r_poly: self.r_poly.clone(),
            rprime_roots: self.rprime_roots.clone(),
        }
    }

    /// Re-verify every searched conclusion (nothing is trusted from the
    /// search itself).
    pub fn verify(&self) -> Result<()> {
        let n = self.n;
        let nn1 = BigInt::from(n) * BigInt::from(n - 1);
        if (&nn1 % &self.p0).is_zero() {
            return Err(Error::CertificationFailure("p0 divides n(n-1)".into()));
        }
        if self.avoid.contains(&self.p1) || self.p1 <= BigInt::from(n) {
            return Err(Error::CertificationFailure("p1 inadmissible".into()));
        }
        if self.avoid.contains(&self.p2)
            || self.p2 <= BigInt::from(n)
            || self.p2 == self.p1
        {
            return Err(Error::CertificationFailure("p2 inadmissible".into()));
        }
        if self.r_poly != eisenstein_poly(n, &self.p0) {
            return Err(Error::CertificationFailure("stored R mismatch".into()));
        }
        let r_mod = FpPoly::from_int_poly(&self.r_poly, &self.p1);
        if !fp_is_irreducible(&r_mod) {
            return Err(Error::CertificationFailure(
                "R is not irreducible mod p1".into(),
            ));
        }
        let rp_mod = FpPoly::from_int_poly(&self.r_poly.derivative(), &self.p1);
        match fp_distinct_linear_split(&rp_mod) {
            Some(roots) if roots == self.rprime_roots => {}
            _ => {
                return Err(Error::CertificationFailure(
                    "R' does not split into the stored distinct roots mod p1".into(),
                ))
            }
        }
        let values = unscaled_values(n, &self.a_prime)?;
        if !pairwise_distinct(&values) {
            return Err(Error::CertificationFailure(
                "critical values of a' not pairwise distinct".into(),
            ));
        }
        let mut reds = BTreeSet::new();
        for v in &values {
            let r = reduce_rational(v, &self.p2).ok_or_else(|| {
                Error::CertificationFailure("critical value not reducible mod p2".into())
            })?;
            if !reds.insert(r) {
                return Err(Error::CertificationFailure(
                    "critical values collide mod p2".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A certified signature region: a direction tuple in the admissible classes
/// whose interval map realizes the requested real-root count.
#[derive(Debug, Clone)]
pub struct SignatureRegion {
    pub target_r: usize,
    pub a: Vec<BigInt>,
    pub interval: OpenInterval,
    pub witness_b: BigRational,
}

/// Partition the b-line by the factor roots of the discriminant and count the
/// real roots of the family member at each cell's sample point.
pub fn signature_intervals(
    n: usize,
    a: &[BigInt],
) -> Result<BTreeMap<usize, Vec<OpenInterval>>> {
    let a_rat = to_rationals(a);
    let data = critical_values(n, &a_rat)?;
    let nn = BigRational::from(BigInt::from(n).pow(n as u32));
    // Roots in b of the linear factors: -head/n^n and -tail_i.
    let mut cuts: Vec<BigRational> = vec![-(&data.head_scaled / &nn)];
    for v in &data.tail {
        cuts.push(-v);
    }
    cuts.sort();
    cuts.dedup();
    let mut cells = Vec::with_capacity(cuts.len() + 1);
    cells.push(OpenInterval {
        lo: Endpoint::NegInf,
        hi: Endpoint::Finite(cuts[0].clone()),
    });
    for w in cuts.windows(2) {
        cells.push(OpenInterval::bounded(w[0].clone(), w[1].clone()));
    }
    cells.push(OpenInterval {
        lo: Endpoint::Finite(cuts[cuts.len() - 1].clone()),
        hi: Endpoint::PosInf,
    });

    let mut map: BTreeMap<usize, Vec<OpenInterval>> = BTreeMap::new();
    for cell in cells {
        let b = cell.sample_point();
        let p = build_p(n, &a_rat, &b)?;
        let count = real_root_count_rat(&p, None)?;
        map.entry(count).or_default().push(cell);
    }
    Ok(map)
}

fn abs_rat(x: &BigRational) -> BigRational {
    if x.is_negative() {
        -x
    } else {
        x.clone()
    }
}

/// Search the admissible congruence classes for a direction tuple whose
/// interval map contains the requested real-root count. Candidates are
/// geometric spreads of critical points (ratio 2) with sign variants,
/// snapped to the classes, at doubling magnitudes; the first exact success
/// in this canonical order is returned.
pub fn find_signature_direction(
    n: usize,
    r: usize,
    cert: &ParamCertificate,
    search_budget: usize,
) -> Result<SignatureRegion> {
    if r > n || (n - r) % 2 != 0 {
        return Err(Error::invalid(format!(
            "find_signature_direction: r = {r} incompatible with n = {n} (need r ≡ n mod 2, 0 ≤ r ≤ n)"
        )));
    }
    let n_big = BigInt::from(n);
    let base = &cert.base;
    let max_modulus = base
        .per_index
        .iter()
        .map(|(_, m)| m.clone())
        .max()
        .expect("nonempty");
    let m0 = &max_modulus * BigInt::from(2);

    let mut tried = 0usize;
    for scale_exp in 0..48u32 {
        let magnitude = &m0 * (BigInt::one() << scale_exp);
        for mask in 0u32..(1 << (n - 1)) {
            if tried >= search_budget {
                return Err(Error::BudgetExhausted {
                    stage: "find_signature_direction",
                    detail: format!(
                        "no direction realizing r = {r} among {tried} candidates"
                    ),
                });
            }
            tried += 1;
            // Target critical points: ±magnitude * 2^i.
            let mut a = Vec::with_capacity(n - 1);
            for i in 0..(n - 1) {
                let sign = if mask & (1 << i) == 0 { 1 } else { -1 };
                let target = &magnitude * BigInt::from(sign) * (BigInt::one() << i);
                let target = if i == 0 { &target * &n_big } else { target };
                a.push(base.snap(i, &target));
            }
            // Critical points must be pairwise distinct for a clean cell map.
            let a_rat = to_rationals(&a);
            let data = match critical_values(n, &a_rat) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let mut pts = data.critical_points.clone();
            pts.sort();
            pts.dedup();
            if pts.len() != n - 1 {
                continue;
            }
            if verify_conditions(
                n,
                &cert.avoid,
                &cert.eisenstein_pair(),
                &cert.p2,
                &cert.a_prime,
                &cert.b1,
                &a,
            )
            .is_err()
            {
                continue;
            }
            let map = signature_intervals(n, &a)?;
            let Some(cells) = map.get(&r) else { continue };
            // Prefer the cell whose sample point is smallest in magnitude
            // (keeps discriminants small early in the scan).
            let cell = cells
                .iter()
                .min_by(|x, y| {
                    abs_rat(&x.sample_point())
                        .cmp(&abs_rat(&y.sample_point()))
                })
                .expect("nonempty cell list")
                .clone();
            let witness = cell.sample_point();
            // Certify the count at the witness and near both ends.
            let mut probes = vec![witness.clone()];
            match (&cell.lo, &cell.hi) {
                (Endpoint::Finite(lo), Endpoint::Finite(hi)) => {
                    let width = hi - lo;
                    let frac = BigRational::new(BigInt::one(), BigInt::from(100));
                    probes.push(lo + &width * &frac);
                    probes.push(hi - &width * &frac);
                }
                (Endpoint::NegInf, Endpoint::Finite(hi)) => {
                    probes.push(hi - BigRational::from(BigInt::from(2)));
                    probes.push(hi - BigRational::from(BigInt::from(1000)));
                }
                (Endpoint::Finite(lo), Endpoint::PosInf) => {
                    probes.push(lo + BigRational::from(BigInt::from(2)));
                    probes.push(lo + BigRational::from(BigInt::from(1000)));
                }
                _ => {}
            }
            let mut all_match = true;
            for b in &probes {
                let p = build_p(n, &a_rat, b)?;
                if real_root_count_rat(&p, None)? != r {
                    all_match = false;
                    break;
                }
            }
            if !all_match {
                continue;
            }
            return Ok(SignatureRegion {
                target_r: r,
                a,
                interval: cell,
                witness_b: witness,
            });
        }
    }
    Err(Error::BudgetExhausted {
        stage: "find_signature_direction",
        detail: format!("no direction realizing r = {r} among {tried} candidates"),
    })
}

/// Scale a certified direction by q ≡ 1 (mod the assembled modulus), q ≥ 1:
/// parameters A*q, the same constant-term class, and the window scaled by
/// q^n. Conditions are re-verified on the scaled tuple.
pub fn scale_params(
    region: &SignatureRegion,
    cert: &ParamCertificate,
    q: &BigInt,
) -> Result<FamilyParams> {
    if !q.is_positive() {
        return Err(Error::invalid("scale_params: q must be ≥ 1"));
    }
    if !(q - BigInt::one())
        .mod_floor(&cert.assembled_modulus)
        .is_zero()
    {
        return Err(Error::invalid(format!(
            "scale_params: q must be ≡ 1 mod {}",
            cert.assembled_modulus
        )));
    }
    let a: Vec<BigInt> = region.a.iter().map(|x| x * q).collect();
    verify_conditions(
        cert.n,
        &cert.avoid,
        &cert.eisenstein_pair(),
        &cert.p2,
        &cert.a_prime,
        &cert.b1,
        &a,
    )?;
    let qn = BigRational::from(q.pow(cert.n as u32));
    Ok(FamilyParams {
        n: cert.n,
        a,
        b_residue: cert.b_residue.clone(),
        b_modulus: cert.b_modulus.clone(),
        b_interval: Some(region.interval.scale(&qn)),
        q: q.clone(),
    })
}
