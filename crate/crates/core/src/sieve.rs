//! Local squarefree densities for products of linear forms (univariate and
//! homogenized bivariate variants), truncated density products with tail
//! bounds, and the closed-form discriminant densities with enumeration and
//! Monte-Carlo cross-checks.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::{is_prime, mod_inverse, primes_up_to};
use crate::family::LinearFactorSystem;
use crate::polyarith::{discriminant, IntPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    Enumeration,
    ClosedForm,
}

/// Exact local density a(p) for one prime.
#[derive(Debug, Clone)]
pub struct LocalDensity {
    pub p: BigInt,
    pub value: BigRational,
    pub method: DensityMethod,
}

/// Which density variant a profile was computed for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SieveVariant {
    Univariate,
    Bivariate { n: usize, t: BigInt },
}

/// Options controlling when exact enumeration is used.
#[derive(Debug, Clone, Copy)]
pub struct SieveOptions {
    /// Enumerate x mod p^2 for p up to this bound (univariate).
    pub enum_threshold_univariate: u64,
    /// Enumerate pairs mod p^2 for p up to this bound (bivariate).
    pub enum_threshold_bivariate: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            enum_threshold_univariate: 97,
            enum_threshold_bivariate: 23,
        }
    }
}

fn validate_system(system: &LinearFactorSystem) -> Result<()> {
    if system.factors.is_empty() {
        return Err(Error::invalid("density: empty factor system"));
    }
    for f in &system.factors {
        if f.slope.is_zero() {
            return Err(Error::invalid("density: degenerate factor with zero slope"));
        }
    }
    if !system.is_pairwise_coprime() {
        return Err(Error::invalid(
            "density: factor system is not squarefree (two factors proportional)",
        ));
    }
    Ok(())
}

/// Exact a(p) = #{x mod p^2 : A(x) ≢ 0 mod p^2} / p^2 by direct enumeration.
fn enumerate_univariate(system: &LinearFactorSystem, p: &BigInt) -> BigRational {
    let p2 = p * p;
    let factors: Vec<(BigInt, BigInt)> = system
        .factors
        .iter()
        .map(|f| (f.slope.mod_floor(&p2), f.intercept.mod_floor(&p2)))
        .collect();
    let mut survivors = BigInt::zero();
    let mut x = BigInt::zero();
    while x < p2 {
        let mut acc = BigInt::one();
        for (c, d) in &factors {
            acc = (acc * (c * &x + d)).mod_floor(&p2);
            if acc.is_zero() {
                break;
            }
        }
        if !acc.is_zero() {
            survivors += 1;
        }
        x += 1;
    }
    BigRational::new(survivors, p2)
}

/// Exact killed-residue count mod p^2 without enumeration.
///
/// Valid for any p with ν_p(gcd(slope, intercept)) ≤ 1 for every factor.
/// The killed set is the union of
///   - one residue mod p^2 per factor with p ∤ slope,
///   - the classes x ≡ r (mod p) where two factors simultaneously vanish
///     mod p (possible only when p divides a cross determinant), and
///   - the classes coming from factors with p | gcd(slope, intercept)
///     (the reduced factor vanishing mod p) or such a factor paired with any
///     other factor vanishing mod p.
fn counted_univariate(system: &LinearFactorSystem, p: &BigInt) -> Option<BigRational> {
    let p2 = p * p;
    let mut point_kills: BTreeSet<BigInt> = BTreeSet::new(); // residues mod p^2
    let mut class_kills: BTreeSet<BigInt> = BTreeSet::new(); // residues mod p

    // Factors that vanish identically mod p (content divisible by p).
    let mut always_zero_mod_p: Vec<usize> = vec![];
    // Root mod p of each factor that has one (p ∤ slope).
    let mut roots_mod_p: Vec<Option<BigInt>> = vec![None; system.factors.len()];

    for (i, f) in system.factors.iter().enumerate() {
        let c_val = f.slope.mod_floor(p);
        let d_val = f.intercept.mod_floor(p);
        if c_val.is_zero() && d_val.is_zero() {
            // Content p^e; e ≥ 2 kills everything.
            let c1 = (&f.slope / p).mod_floor(p);
            let d1 = (&f.intercept / p).mod_floor(p);
            if c1.is_zero() && d1.is_zero() {
                return Some(BigRational::zero());
            }
            always_zero_mod_p.push(i);
            // p^2 | p*(c' x + d') iff c' x + d' ≡ 0 (mod p).
            if !c1.is_zero() {
                let inv = mod_inverse(&c1, p)?;
                class_kills.insert(((-d1) * inv).mod_floor(p));
            }
        } else if c_val.is_zero() {
            // p | slope, p ∤ intercept: the factor is never divisible by p.
        } else {
            let inv2 = mod_inverse(&f.slope.mod_floor(&p2), &p2)?;
            point_kills.insert(((-&f.intercept) * inv2).mod_floor(&p2));
            let invp = mod_inverse(&c_val, p)?;
            roots_mod_p[i] = Some(((-d_val) * invp).mod_floor(p));
        }
    }

    // Two always-zero factors make the product divisible by p^2 everywhere.
    if always_zero_mod_p.len() >= 2 {
        return Some(BigRational::zero());
    }
    // An always-zero factor combined with any other factor's root mod p.
    if always_zero_mod_p.len() == 1 {
        for r in roots_mod_p.iter().flatten() {
            class_kills.insert(r.clone());
        }
    }
    // Pairs of ordinary factors sharing a root mod p.
    for i in 0..system.factors.len() {
        for j in (i + 1)..system.factors.len() {
            if let (Some(ri), Some(rj)) = (&roots_mod_p[i], &roots_mod_p[j]) {
                if ri == rj {
                    class_kills.insert(ri.clone());
                }
            }
        }
    }

    // Count the union exactly: whole classes mod p, plus points not covered.
    let mut killed = BigInt::from(class_kills.len() as u64) * p;
    for x in &point_kills {
        if !class_kills.contains(&x.mod_floor(p)) {
            killed += 1;
        }
    }
    Some(BigRational::one() - BigRational::new(killed, p2))
}

/// Exceptional primes of a system: divisors of a cross determinant, a slope,
/// or a factor content.
fn is_exceptional(system: &LinearFactorSystem, p: &BigInt) -> bool {
    for (i, f) in system.factors.iter().enumerate() {
        if (&f.slope % p).is_zero() {
            return true;
        }
        for g in &system.factors[i + 1..] {
            let det = &f.slope * &g.intercept - &g.slope * &f.intercept;
            if (det % p).is_zero() {
                return true;
            }
        }
    }
    false
}

/// Local density for the univariate squarefree sieve:
/// a(p) = #{x in [0, p^2): A(x) ≢ 0 mod p^2} / p^2.
pub fn local_density_univariate(
    system: &LinearFactorSystem,
    p: &BigInt,
    opts: &SieveOptions,
) -> Result<LocalDensity> {
    validate_system(system)?;
    if !is_prime(p) {
        return Err(Error::invalid(format!("density: {p} is not prime")));
    }
    let small = p
        .to_u64()
        .map(|v| v <= opts.enum_threshold_univariate)
        .unwrap_or(false);
    if small {
        return Ok(LocalDensity {
            p: p.clone(),
            value: enumerate_univariate(system, p),
            method: DensityMethod::Enumeration,
        });
    }
    if !is_exceptional(system, p) {
        // Each factor (p ∤ slope here since slopes divide no huge prime
        // unless exceptional) kills exactly one residue mod p^2, all distinct.
        let k = BigInt::from(system.factors.len() as u64);
        return Ok(LocalDensity {
            p: p.clone(),
            value: BigRational::one() - BigRational::new(k, p * p),
            method: DensityMethod::ClosedForm,
        });
    }
    // Exceptional large prime: exact structural count.
    let value = counted_univariate(system, p).ok_or_else(|| {
        Error::invalid("density: unexpected non-invertible slope at an exceptional prime")
    })?;
    Ok(LocalDensity {
        p: p.clone(),
        value,
        method: DensityMethod::ClosedForm,
    })
}

/// Exact bivariate enumeration: pairs (x, y) in [0, p^2)^2 that are not both
/// divisible by p, with A(x, y^n) ≢ 0 mod p^2, normalized by p^4 - p^2.
fn enumerate_bivariate(system: &LinearFactorSystem, n: usize, p: &BigInt) -> BigRational {
    let p2 = p * p;
    let pv = p2.to_u64().expect("enumeration threshold keeps p^2 small");
    let factors: Vec<(BigInt, BigInt)> = system
        .factors
        .iter()
        .map(|f| (f.slope.mod_floor(&p2), f.intercept.mod_floor(&p2)))
        .collect();
    let p_u = p.to_u64().unwrap();
    let mut survivors = 0u64;
    for y in 0..pv {
        let yb = BigInt::from(y);
        let yn = yb.modpow(&BigInt::from(n as u64), &p2);
        let y_div = y % p_u == 0;
        for x in 0..pv {
            if y_div && x % p_u == 0 {
                continue;
            }
            let xb = BigInt::from(x);
            let mut acc = BigInt::one();
            for (c, d) in &factors {
                acc = (acc * (c * &xb + d * &yn)).mod_floor(&p2);
                if acc.is_zero() {
                    break;
                }
            }
            if !acc.is_zero() {
                survivors += 1;
            }
        }
    }
    let denom = &p2 * &p2 - &p2;
    BigRational::new(BigInt::from(survivors), denom)
}

/// Structural bivariate count for p ∤ t, valid when every slope and every
/// factor content is coprime to p. Pairs with p | y contribute no kills
/// (each factor reduces to slope*x with both units); for the (p^2 - p) unit
/// values of y the kill pattern is the univariate one scaled by y^n, so the
/// per-y kill count equals the count at y = 1.
fn counted_bivariate(system: &LinearFactorSystem, p: &BigInt) -> Option<BigRational> {
    for f in &system.factors {
        if (&f.slope % p).is_zero() {
            return None;
        }
    }
    let p2 = p * p;
    let mut point_kills: BTreeSet<BigInt> = BTreeSet::new();
    let mut class_kills: BTreeSet<BigInt> = BTreeSet::new();
    let mut roots_mod_p: Vec<BigInt> = vec![];
    for f in &system.factors {
        let inv2 = mod_inverse(&f.slope.mod_floor(&p2), &p2)?;
        point_kills.insert(((-&f.intercept) * inv2).mod_floor(&p2));
        let invp = mod_inverse(&f.slope.mod_floor(p), p)?;
        roots_mod_p.push(((-&f.intercept) * invp).mod_floor(p));
    }
    for i in 0..roots_mod_p.len() {
        for j in (i + 1)..roots_mod_p.len() {
            if roots_mod_p[i] == roots_mod_p[j] {
                class_kills.insert(roots_mod_p[i].clone());
            }
        }
    }
    let mut killed_per_y = BigInt::from(class_kills.len() as u64) * p;
    for x in &point_kills {
        if !class_kills.contains(&x.mod_floor(p)) {
            killed_per_y += 1;
        }
    }
    // Every killed (x, y) with y a unit is an admissible pair, so the total
    // is the per-y count times the p^2 - p unit values of y.
    let killed = killed_per_y * (&p2 - p);
    let denom = &p2 * &p2 - &p2;
    Some(BigRational::one() - BigRational::new(killed, denom))
}

/// Local density for the homogenized bivariate sieve. For p | t the
/// univariate form with y fixed to 1 applies; otherwise pairs (x, y) mod p^2
/// not both divisible by p are counted against A(x, y^n).
pub fn local_density_bivariate(
    system: &LinearFactorSystem,
    n: usize,
    t: &BigInt,
    p: &BigInt,
    opts: &SieveOptions,
) -> Result<LocalDensity> {
    validate_system(system)?;
    if n < 1 {
        return Err(Error::invalid("density: homogenization exponent must be ≥ 1"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("density: {p} is not prime")));
    }
    if (t % p).is_zero() {
        let mut d = local_density_univariate(system, p, opts)?;
        d.p = p.clone();
        return Ok(d);
    }
    let small = p
        .to_u64()
        .map(|v| v <= opts.enum_threshold_bivariate)
        .unwrap_or(false);
    if small {
        return Ok(LocalDensity {
            p: p.clone(),
            value: enumerate_bivariate(system, n, p),
            method: DensityMethod::Enumeration,
        });
    }
    match counted_bivariate(system, p) {
        Some(value) => Ok(LocalDensity {
            p: p.clone(),
            value,
            method: DensityMethod::ClosedForm,
        }),
        None => {
            // Slope divisible by a large prime: fall back to enumeration when
            // the p^4 pair count stays tractable.
            if p.to_u64().map(|v| v <= 60).unwrap_or(false) {
                Ok(LocalDensity {
                    p: p.clone(),
                    value: enumerate_bivariate(system, n, p),
                    method: DensityMethod::Enumeration,
                })
            } else {
                Err(Error::invalid(
                    "density: bivariate count with p | slope is only supported by enumeration",
                ))
            }
        }
    }
}

/// Truncated product with the elementary tail bound
/// sum_{m > P} m^-2 < 1/P: lower = upper * (1 - k/cutoff), clamped at 0.
pub fn truncated_product(
    densities: &BTreeMap<BigInt, BigRational>,
    factor_count: usize,
    cutoff: u64,
) -> (BigRational, BigRational) {
    let mut upper = BigRational::one();
    for v in densities.values() {
        upper *= v;
    }
    if upper.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let tail = BigRational::new(BigInt::from(factor_count as u64), BigInt::from(cutoff));
    let lower_raw = &upper * (BigRational::one() - tail);
    let lower = if lower_raw.is_negative() {
        BigRational::zero()
    } else {
        lower_raw
    };
    (lower, upper)
}

/// Density profile over all primes up to the cutoff.
#[derive(Debug, Clone)]
pub struct SieveProfile {
    pub system: LinearFactorSystem,
    pub variant: SieveVariant,
    pub densities: BTreeMap<BigInt, BigRational>,
    pub methods: BTreeMap<BigInt, DensityMethod>,
    pub cutoff: u64,
    pub tail_bound: BigRational,
    pub product_lower: BigRational,
    pub product_upper: BigRational,
}

/// Compute a full profile (per-prime densities in parallel, deterministic
/// assembly).
pub fn build_profile(
    system: &LinearFactorSystem,
    variant: SieveVariant,
    cutoff: u64,
    opts: &SieveOptions,
) -> Result<SieveProfile> {
    validate_system(system)?;
    let primes = primes_up_to(cutoff);
    let computed: Vec<LocalDensity> = primes
        .par_iter()
        .map(|&p| {
            let pb = BigInt::from(p);
            match &variant {
                SieveVariant::Univariate => local_density_univariate(system, &pb, opts),
                SieveVariant::Bivariate { n, t } => {
                    local_density_bivariate(system, *n, t, &pb, opts)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut densities = BTreeMap::new();
    let mut methods = BTreeMap::new();
    for d in computed {
        densities.insert(d.p.clone(), d.value.clone());
        methods.insert(d.p, d.method);
    }
    let (lower, upper) = truncated_product(&densities, system.factors.len(), cutoff);
    let tail_bound = &upper - &lower;
    Ok(SieveProfile {
        system: system.clone(),
        variant,
        densities,
        methods,
        cutoff,
        tail_bound,
        product_lower: lower,
        product_upper: upper,
    })
}

/// Closed-form density of squarefree-discriminant monic polynomials mod p^2:
///   1/2                                  p = 2
///   1 - 1/p^2                            p > 2, n = 2
///   1 - 2/p^2 + 1/p^3                    p > 2, n = 3
///   1 - 1/p + (p-1)^2 (1-(-p)^(2-n)) / (p^2 (p+1))   p > 2, n ≥ 4
pub fn brakenhoff_density(n: usize, p: &BigInt) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::invalid("brakenhoff_density: n must be ≥ 2"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("brakenhoff_density: {p} is not prime")));
    }
    let one = BigRational::one();
    if p == &BigInt::from(2) {
        return Ok(BigRational::new(BigInt::one(), BigInt::from(2)));
    }
    let p_rat = BigRational::from(p.clone());
    let p2 = &p_rat * &p_rat;
    match n {
        2 => Ok(&one - p2.recip()),
        3 => {
            let p3 = &p2 * &p_rat;
            Ok(&one - BigRational::from(BigInt::from(2)) / &p2 + p3.recip())
        }
        _ => {
            // (-p)^(2-n) = 1 / (-p)^(n-2)
            let neg_p = -&p_rat;
            let mut pw = BigRational::one();
            for _ in 0..(n - 2) {
                pw *= &neg_p;
            }
            let inner = &one - pw.recip();
            let num = (&p_rat - &one) * (&p_rat - &one) * inner;
            let den = &p2 * (&p_rat + &one);
            Ok(&one - p_rat.recip() + num / den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct EmpiricalDensity {
    pub value: BigRational,
    /// Binomial standard error (sampling mode only).
    pub standard_error: Option<f64>,
    pub samples: u64,
}

fn disc_not_divisible_by_p2(coeffs_mod_p2: &[BigInt], n: usize, p2: &BigInt) -> bool {
    let mut c: Vec<BigInt> = coeffs_mod_p2.to_vec();
    c.push(BigInt::one()); // monic
    let poly = IntPoly::new(c);
    if poly.degree() != Some(n) {
        // Leading coefficient is exactly 1, so this cannot happen.
        unreachable!("monic lift has full degree");
    }
    let d = discriminant(&poly).expect("monic, degree ≥ 2");
    !d.mod_floor(p2).is_zero()
}

/// Fraction of monic degree-n coefficient tuples mod p^2 whose discriminant
/// is not divisible by p^2. Exhaustive mode is exact; sampling reports the
/// mean with its standard error.
pub fn brakenhoff_empirical(
    n: usize,
    p: &BigInt,
    mode: EmpiricalMode,
    work_limit: u64,
) -> Result<EmpiricalDensity> {
    if n < 2 {
        return Err(Error::invalid("brakenhoff_empirical: n must be ≥ 2"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!(
            "brakenhoff_empirical: {p} is not prime"
        )));
    }
    let p2 = p * p;
    match mode {
        EmpiricalMode::Exhaustive => {
            let m = p2
                .to_u64()
                .ok_or_else(|| Error::invalid("brakenhoff_empirical: p too large"))?;
            let total = (m as f64).powi(n as i32);
            if total > work_limit as f64 {
                return Err(Error::invalid(format!(
                    "brakenhoff_empirical: p^(2n) = {total} exceeds the work limit {work_limit}"
                )));
            }
            let total = m.pow(n as u32);
            let hits: u64 = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let mut rest = idx;
                    let coeffs: Vec<BigInt> = (0..n)
                        .map(|_| {
                            let c = rest % m;
                            rest /= m;
                            BigInt::from(c)
                        })
                        .collect();
                    u64::from(disc_not_divisible_by_p2(&coeffs, n, &p2))
                })
                .sum();
            Ok(EmpiricalDensity {
                value: BigRational::new(BigInt::from(hits), BigInt::from(total)),
                standard_error: None,
                samples: total,
            })
        }
        EmpiricalMode::Sample { count, seed } => {
            use rand::{Rng, SeedableRng};
            if count == 0 {
                return Err(Error::invalid("brakenhoff_empirical: zero samples"));
            }
            let seeds: Vec<u64> = (0..count).collect();
            let hits: u64 = seeds
                .par_iter()
                .map(|&i| {
                    let mut rng =
                        rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(i * 0x9e37));
                    let coeffs: Vec<BigInt> = (0..n)
                        .map(|_| {
                            let lo: u64 = rng.gen();
                            BigInt::from(lo).mod_floor(&p2)
                        })
                        .collect();
                    u64::from(disc_not_divisible_by_p2(&coeffs, n, &p2))
                })
                .sum();
            let f = hits as f64 / count as f64;
            Ok(EmpiricalDensity {
                value: BigRational::new(BigInt::from(hits), BigInt::from(count)),
                standard_error: Some((f * (1.0 - f) / count as f64).sqrt()),
                samples: count,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::LinearFactor;

    fn system(factors: &[(i64, i64)]) -> LinearFactorSystem {
        LinearFactorSystem {
            sign: 1,
            factors: factors
                .iter()
                .map(|&(c, d)| LinearFactor {
                    slope: BigInt::from(c),
                    intercept: BigInt::from(d),
                })
                .collect(),
        }
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn opts() -> SieveOptions {
        SieveOptions::default()
    }

    #[test]
    fn univariate_examples() {
        // A(x) = x, p=2 -> 3/4
        let d = local_density_univariate(&system(&[(1, 0)]), &BigInt::from(2), &opts()).unwrap();
        assert_eq!(d.value, rat(3, 4));
        // A(x) = x(x+1), p=2 -> 1/2
        let d =
            local_density_univariate(&system(&[(1, 0), (1, 1)]), &BigInt::from(2), &opts()).unwrap();
        assert_eq!(d.value, rat(1, 2));
        // A(x) = x(x+1), p=5 -> 23/25
        let d =
            local_density_univariate(&system(&[(1, 0), (1, 1)]), &BigInt::from(5), &opts()).unwrap();
        assert_eq!(d.value, rat(23, 25));
    }

    #[test]
    fn repeated_factor_rejected() {
        assert!(local_density_univariate(&system(&[(1, 0), (2, 0)]), &BigInt::from(3), &opts())
            .is_err());
        assert!(local_density_univariate(&system(&[(0, 3)]), &BigInt::from(3), &opts()).is_err());
    }

    #[test]
    fn structural_count_matches_enumeration() {
        // Includes exceptional situations: shared roots mod p, contents
        // divisible by p, slopes divisible by p.
        let cases = vec![
            system(&[(1, 0)]),
            system(&[(1, 0), (1, 1)]),
            system(&[(1, 0), (1, 7)]),          // det 7
            system(&[(1, 2), (1, 9)]),          // det 7
            system(&[(7, 2), (1, 3)]),          // slope divisible by 7
            system(&[(14, 7), (1, 5)]),         // content 7
            system(&[(49, 14), (1, 5)]),        // content 7, slope 49
            system(&[(1, 0), (1, 49)]),         // det 49
            system(&[(4, -4)]),                 // content 4 (density 0 at 2)
            system(&[(27, 54), (1, 5), (1, 12)]), // det(2,3) = 7
        ];
        for sys in &cases {
            for p in [2i64, 3, 5, 7, 11, 13] {
                let pb = BigInt::from(p);
                let enumerated = enumerate_univariate(sys, &pb);
                match counted_univariate(sys, &pb) {
                    Some(counted) => {
                        assert_eq!(counted, enumerated, "system {sys:?} p={p}");
                    }
                    None => panic!("count failed for {sys:?} p={p}"),
                }
            }
        }
    }

    #[test]
    fn closed_form_agreement_on_clean_primes() {
        // For primes not dividing slopes or cross determinants, the closed
        // form 1 - k/p^2 must equal enumeration exactly (7 ≤ p ≤ 97).
        let sys = system(&[(4, -3), (1, 5), (1, -11)]);
        for p in primes_up_to(97) {
            if p < 7 {
                continue;
            }
            let pb = BigInt::from(p);
            if is_exceptional(&sys, &pb) {
                continue;
            }
            let enumerated = enumerate_univariate(&sys, &pb);
            let closed = BigRational::one() - BigRational::new(BigInt::from(3), &pb * &pb);
            assert_eq!(enumerated, closed, "p = {p}");
        }
    }

    #[test]
    fn content_four_gives_zero_at_two() {
        // A(x) = 4x - 4: every value divisible by 4.
        let d = local_density_univariate(&system(&[(4, -4)]), &BigInt::from(2), &opts()).unwrap();
        assert_eq!(d.value, BigRational::zero());
    }

    #[test]
    fn bivariate_examples() {
        // A(x,y) = x, p=2, p ∤ t: survivors among pairs not both even with
        // 4 ∤ x: a(2) = 10/12 = 5/6 = 1 - 1/(p^2+p).
        let d = local_density_bivariate(
            &system(&[(1, 0)]),
            2,
            &BigInt::from(3),
            &BigInt::from(2),
            &opts(),
        )
        .unwrap();
        assert_eq!(d.value, rat(5, 6));
        // p | t reduces to the univariate value.
        let d = local_density_bivariate(
            &system(&[(1, 0)]),
            2,
            &BigInt::from(6),
            &BigInt::from(2),
            &opts(),
        )
        .unwrap();
        assert_eq!(d.value, rat(3, 4));
        // A(x,y) = x(x+y), n=1, p=3: exact enumeration over 81 pairs.
        let d = local_density_bivariate(
            &system(&[(1, 0), (1, 1)]),
            1,
            &BigInt::from(2),
            &BigInt::from(3),
            &opts(),
        )
        .unwrap();
        assert_eq!(d.method, DensityMethod::Enumeration);
        // Clean prime: 1 - 2/(p^2+p) = 1 - 2/12 = 5/6.
        assert_eq!(d.value, rat(5, 6));
    }

    #[test]
    fn bivariate_structural_matches_enumeration() {
        let cases = vec![
            (system(&[(1, 0)]), 2usize),
            (system(&[(1, 0), (1, 1)]), 1),
            (system(&[(1, 0), (1, 1)]), 3),
            (system(&[(1, 2), (1, 9)]), 2), // det 7
            (system(&[(4, -3), (1, 5)]), 3),
            (system(&[(27, 54), (1, 5)]), 4),
        ];
        let t = BigInt::from(1);
        for (sys, n) in &cases {
            for p in [3i64, 5, 7, 11] {
                let pb = BigInt::from(p);
                if (&t % &pb).is_zero() {
                    continue;
                }
                let enumerated = enumerate_bivariate(sys, *n, &pb);
                if let Some(counted) = counted_bivariate(sys, &pb) {
                    assert_eq!(counted, enumerated, "system {sys:?} n={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn truncated_product_bounds() {
        let sys = system(&[(1, 0)]);
        let profile = build_profile(&sys, SieveVariant::Univariate, 100, &opts()).unwrap();
        // upper = prod_{p ≤ 100} (1 - 1/p^2), tail < 1/100
        assert!(profile.product_lower < profile.product_upper);
        let gap = &profile.product_upper - &profile.product_lower;
        let bound = &profile.product_upper * rat(1, 100);
        assert!(gap <= bound);
        // Compare against 6/pi^2 ≈ 0.6079 loosely.
        let up = profile.product_upper.to_f64().unwrap();
        assert!(up > 0.6 && up < 0.62);

        // Zero density anywhere -> (0, 0).
        let sys0 = system(&[(4, -4)]);
        let profile0 = build_profile(&sys0, SieveVariant::Univariate, 50, &opts()).unwrap();
        assert!(profile0.product_lower.is_zero() && profile0.product_upper.is_zero());
    }

    #[test]
    fn brakenhoff_table_values() {
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        for n in 2..=7 {
            assert_eq!(brakenhoff_density(n, &two).unwrap(), rat(1, 2));
        }
        assert_eq!(brakenhoff_density(2, &three).unwrap(), rat(8, 9));
        assert_eq!(brakenhoff_density(3, &three).unwrap(), rat(22, 27));
        assert_eq!(brakenhoff_density(4, &three).unwrap(), rat(62, 81));
    }

    #[test]
    fn brakenhoff_exhaustive_small() {
        let v = brakenhoff_empirical(2, &BigInt::from(3), EmpiricalMode::Exhaustive, 10_000_000)
            .unwrap();
        assert_eq!(v.value, rat(8, 9));
        let v = brakenhoff_empirical(2, &BigInt::from(2), EmpiricalMode::Exhaustive, 10_000_000)
            .unwrap();
        assert_eq!(v.value, rat(1, 2));
    }

    #[test]
    fn brakenhoff_sampling_reports_error() {
        let v = brakenhoff_empirical(
            3,
            &BigInt::from(5),
            EmpiricalMode::Sample {
                count: 2000,
                seed: 42,
            },
            10_000_000,
        )
        .unwrap();
        let expected = brakenhoff_density(3, &BigInt::from(5))
            .unwrap()
            .to_f64()
            .unwrap();
        let got = v.value.to_f64().unwrap();
        let se = v.standard_error.unwrap();
        assert!((got - expected).abs() < 5.0 * se.max(1e-3), "got {got}, expected {expected}");
    }
}
