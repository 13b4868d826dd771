//! Exact-arithmetic substrate: arbitrary-precision integers and rationals,
//! primality, factorization with an effort budget, CRT, and squarefree testing.
//!
//! All operations are pure functions of their inputs; values are immutable
//! and safely shareable across threads.

mod crt;
mod factorize;
mod primality;

pub use crt::{crt_solve, gcd_all, mod_inverse};
pub use factorize::{
    factorize, is_squarefree, primes_up_to, sieve_primes, EffortBudget, FactorOutcome,
    Factorization, SquarefreeStatus,
};
pub use primality::{is_prime, is_prime_u64, primality_is_deterministic, PROBABILISTIC_ROUNDS};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Parse a decimal string into a BigInt (the I/O convention: all big integers
/// cross interfaces as decimal strings).
pub fn parse_bigint(s: &str) -> crate::error::Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| crate::error::Error::invalid(format!("bad integer {s:?}: {e}")))
}

/// Parse "num/den" or a plain integer into an exact rational.
pub fn parse_rational(s: &str) -> crate::error::Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_bigint(num)?;
        let d = parse_bigint(den)?;
        if d == BigInt::from(0) {
            return Err(crate::error::Error::invalid("zero denominator"));
        }
        Ok(BigRational::new(n, d))
    } else {
        Ok(BigRational::from(parse_bigint(s)?))
    }
}

/// Render a rational as "num/den" (or a bare integer when the denominator is 1).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
