use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use super::primality::{is_prime, primality_is_deterministic};
use crate::error::{Error, Result};

/// Complete verified factorization: sign * prod(p_i^e_i).
///
/// Invariants: primes strictly increasing, every prime passes the primality
/// test, and `product()` reconstructs the input exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// True when every prime was certified by the deterministic (< 2^64) test.
    pub fn all_primes_deterministic(&self) -> bool {
        self.factors.iter().all(|(p, _)| primality_is_deterministic(p))
    }

    pub fn verify(&self, input: &BigInt) -> bool {
        if self.product() != *input {
            return false;
        }
        for w in self.factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return false;
            }
        }
        self.factors.iter().all(|(p, _)| is_prime(p))
    }
}

/// Outcome of `factorize`: complete, or a verified partial factorization with
/// a composite cofactor left over when the effort budget runs out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome {
    Complete(Factorization),
    Indeterminate {
        partial: Factorization,
        cofactor: BigInt,
    },
}

impl FactorOutcome {
    pub fn complete(&self) -> Option<&Factorization> {
        match self {
            FactorOutcome::Complete(f) => Some(f),
            FactorOutcome::Indeterminate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquarefreeStatus {
    Squarefree,
    NotSquarefree,
    Indeterminate,
}

/// Effort budget for `factorize`. Exceeding it yields Indeterminate, never a guess.
#[derive(Debug, Clone, Copy)]
pub struct EffortBudget {
    /// Trial division bound (all primes below are removed).
    pub trial_bound: u64,
    /// Total Pollard-rho iterations across all splitting attempts.
    pub rho_iterations: u64,
}

impl Default for EffortBudget {
    fn default() -> Self {
        EffortBudget {
            trial_bound: 100_000,
            rho_iterations: 1 << 22,
        }
    }
}

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| sieve_primes(100_000));

pub fn sieve_primes(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Primes up to `bound`, served from a shared sieve when possible.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound <= 100_000 {
        let idx = SMALL_PRIMES.partition_point(|&p| p <= bound);
        SMALL_PRIMES[..idx].to_vec()
    } else {
        sieve_primes(bound)
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Brent-variant Pollard rho on u64. Returns a nontrivial factor.
fn rho_u64(n: u64, budget: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1u64.. {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        let mut saved = (0u64, 0u64);
        let mut prod = 1u64;
        let mut count = 0u64;
        while d == 1 {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            x = f(x);
            y = f(f(y));
            prod = mulmod_u64(prod, x.abs_diff(y), n);
            count += 1;
            if count % 64 == 0 {
                d = prod.gcd(&n);
                if d == 1 {
                    saved = (x, y);
                    prod = 1;
                }
            }
        }
        if d != n {
            return Some(d);
        }
        // Backtrack one batch step-by-step to recover the factor.
        let (mut x, mut y) = saved;
        for _ in 0..64 {
            x = f(x);
            y = f(f(y));
            let d = x.abs_diff(y).gcd(&n);
            if d > 1 && d < n {
                return Some(d);
            }
        }
        // Cycle degenerated for this c; try the next one.
    }
    None
}

/// Brent-variant Pollard rho on BigInt with batched gcds.
fn rho_big(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    let one = BigInt::one();
    for c in 1u64..=64 {
        let c_big = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c_big).mod_floor(n);
        let mut x = BigInt::from(2);
        let mut y = x.clone();
        let mut prod = BigInt::one();
        let mut saved = (x.clone(), y.clone());
        let mut count = 0u64;
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            x = f(&x);
            y = f(&f(&y));
            prod = (&prod * (&x - &y).abs()).mod_floor(n);
            count += 1;
            if count % 128 == 0 {
                let d = prod.gcd(n);
                if d > one {
                    if &d < n {
                        return Some(d);
                    }
                    // Overshot: replay the last batch one step at a time.
                    let (mut bx, mut by) = saved.clone();
                    for _ in 0..128 {
                        bx = f(&bx);
                        by = f(&f(&by));
                        let d = (&bx - &by).abs().gcd(n);
                        if d > one && &d < n {
                            return Some(d);
                        }
                    }
                    break; // try next c
                }
                saved = (x.clone(), y.clone());
                prod = BigInt::one();
            }
        }
    }
    None
}

/// Strip perfect-power structure: returns (base, k) with base^k = n, k maximal-ish.
fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let bits = n.bits();
    for k in (2..=bits.max(2) as u32).rev() {
        let r = n.nth_root(k);
        if r.pow(k) == *n && r > BigInt::one() {
            return Some((r, k));
        }
    }
    None
}

/// Factor m ≠ 0 completely within the effort budget.
pub fn factorize(m: &BigInt, effort: &EffortBudget) -> Result<FactorOutcome> {
    if m.is_zero() {
        return Err(Error::invalid("factorize: input must be nonzero"));
    }
    let sign = if m.is_negative() { -1 } else { 1 };
    let mut n = m.abs();
    let mut counts: std::collections::BTreeMap<BigInt, u32> = Default::default();

    for &p in primes_up_to(effort.trial_bound).iter() {
        if n.is_one() {
            break;
        }
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            break;
        }
        while (&n % &pb).is_zero() {
            n /= &pb;
            *counts.entry(pb.clone()).or_insert(0) += 1;
        }
    }

    let mut rho_budget = effort.rho_iterations;
    let mut pending = vec![];
    if !n.is_one() {
        pending.push((n, 1u32));
    }
    let mut leftover: Option<BigInt> = None;

    while let Some((c, mult)) = pending.pop() {
        if c.is_one() {
            continue;
        }
        if is_prime(&c) {
            *counts.entry(c).or_insert(0) += mult;
            continue;
        }
        if let Some((base, k)) = perfect_power(&c) {
            pending.push((base, mult * k));
            continue;
        }
        let split = if let Some(small) = c.to_u64() {
            rho_u64(small, &mut rho_budget).map(BigInt::from)
        } else {
            rho_big(&c, &mut rho_budget)
        };
        match split {
            Some(d) => {
                let other = &c / &d;
                pending.push((d, mult));
                pending.push((other, mult));
            }
            None => {
                // Budget exhausted with a composite cofactor.
                let mut cof = c.pow(mult);
                for (rest, rmult) in pending {
                    cof *= rest.pow(rmult);
                }
                leftover = Some(cof);
                break;
            }
        }
    }

    let partial = Factorization {
        sign,
        factors: counts.into_iter().collect(),
    };
    match leftover {
        None => {
            debug_assert!(partial.verify(m));
            Ok(FactorOutcome::Complete(partial))
        }
        Some(cofactor) => Ok(FactorOutcome::Indeterminate { partial, cofactor }),
    }
}

/// Squarefree test for m ≠ 0: true iff no prime square divides |m|.
pub fn is_squarefree(m: &BigInt, effort: &EffortBudget) -> Result<SquarefreeStatus> {
    if m.is_zero() {
        return Err(Error::invalid(
            "is_squarefree: 0 is divisible by every square",
        ));
    }
    match factorize(m, effort)? {
        FactorOutcome::Complete(f) => Ok(if f.is_squarefree() {
            SquarefreeStatus::Squarefree
        } else {
            SquarefreeStatus::NotSquarefree
        }),
        FactorOutcome::Indeterminate { partial, cofactor } => {
            if !partial.is_squarefree() {
                return Ok(SquarefreeStatus::NotSquarefree);
            }
            // A square cofactor, or one sharing a prime with the factored part,
            // settles the question negatively even without a full split.
            if perfect_power(&cofactor).is_some() {
                return Ok(SquarefreeStatus::NotSquarefree);
            }
            for (p, _) in &partial.factors {
                if (&cofactor % p).is_zero() {
                    return Ok(SquarefreeStatus::NotSquarefree);
                }
            }
            Ok(SquarefreeStatus::Indeterminate)
        }
    }
}
