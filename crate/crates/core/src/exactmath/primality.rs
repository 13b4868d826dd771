use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

/// Witness set making Miller-Rabin deterministic for all inputs below 2^64.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Rounds used above 2^64; error probability < 4^-64 = 2^-128.
pub const PROBABILISTIC_ROUNDS: u32 = 64;

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &U64_WITNESSES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// SplitMix64, used to derive deterministic Miller-Rabin bases for big inputs.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn miller_rabin_big(n: &BigInt, rounds: u32) -> bool {
    let one = BigInt::one();
    let two = BigInt::from(2);
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u64;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    // Deterministic base sequence keyed on the candidate's low bits.
    let mut state = n
        .mod_floor(&BigInt::from(u64::MAX))
        .to_u64()
        .unwrap_or(0x1234_5678_9abc_def0)
        ^ 0xa076_1d64_78bd_642f;
    let span = n - BigInt::from(4);
    'round: for _ in 0..rounds {
        let raw = BigInt::from(splitmix64(&mut state)) * BigInt::from(splitmix64(&mut state));
        let a = raw.mod_floor(&span) + &two; // in [2, n-2]
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'round;
            }
        }
        return false;
    }
    true
}

/// Primality test: deterministic below 2^64, probabilistic (error < 2^-128) above.
pub fn is_prime(m: &BigInt) -> bool {
    if m.is_negative() || m < &BigInt::from(2) {
        return false;
    }
    if let Some(n) = m.to_u64() {
        return is_prime_u64(n);
    }
    if m.is_even() {
        return false;
    }
    for &p in &U64_WITNESSES[1..] {
        if (m % BigInt::from(p)).is_zero() {
            return false;
        }
    }
    miller_rabin_big(m, PROBABILISTIC_ROUNDS)
}

/// Whether `is_prime` on this input was fully deterministic.
pub fn primality_is_deterministic(m: &BigInt) -> bool {
    m.to_u64().is_some()
}

use num_traits::Signed;
