use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Modular inverse of a mod m (m ≥ 1), when gcd(a, m) = 1.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Merge two congruences x ≡ r1 (mod m1), x ≡ r2 (mod m2).
/// Non-coprime moduli are accepted when the residues agree on the overlap.
fn merge(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> Result<(BigInt, BigInt)> {
    let e = m1.extended_gcd(m2);
    let g = &e.gcd;
    let diff = r2 - r1;
    let (q, rem) = diff.div_rem(g);
    if !rem.is_zero() {
        return Err(Error::InconsistentCongruences(format!(
            "x ≡ {r1} (mod {m1}) and x ≡ {r2} (mod {m2}) have no common solution"
        )));
    }
    let lcm = (m1 / g) * m2;
    let m2_over_g = m2 / g;
    // x = r1 + m1 * t with t ≡ q * inv(m1/g) (mod m2/g)
    let inv = mod_inverse(&(m1 / g).mod_floor(&m2_over_g), &m2_over_g).ok_or_else(|| {
        Error::InconsistentCongruences("internal: inverse must exist after gcd reduction".into())
    })?;
    let t = (q * inv).mod_floor(&m2_over_g);
    let x = (r1 + m1 * t).mod_floor(&lcm);
    Ok((x, lcm))
}

/// Solve a system of congruences. Returns (residue, modulus) with
/// 0 ≤ residue < modulus and modulus = lcm of the inputs (= product when
/// the moduli are pairwise coprime, the intended usage).
pub fn crt_solve(congruences: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    if congruences.is_empty() {
        return Err(Error::invalid("crt_solve: empty system"));
    }
    for (_, m) in congruences {
        if m < &BigInt::one() {
            return Err(Error::invalid("crt_solve: every modulus must be ≥ 1"));
        }
    }
    let mut acc_r = congruences[0].0.mod_floor(&congruences[0].1);
    let mut acc_m = congruences[0].1.clone();
    for (r, m) in &congruences[1..] {
        let (nr, nm) = merge(&acc_r, &acc_m, r, m)?;
        acc_r = nr;
        acc_m = nm;
    }
    Ok((acc_r, acc_m))
}

use num_traits::sign::abs;

/// gcd of a slice (≥ 0, gcd of empty slice is 0).
pub fn gcd_all(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(&abs(v.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn pair_example() {
        let (r, m) = crt_solve(&[(big(1), big(2)), (big(2), big(3))]).unwrap();
        assert_eq!((r, m), (big(5), big(6)));
    }

    #[test]
    fn identity_case() {
        let (r, m) = crt_solve(&[(big(0), big(5))]).unwrap();
        assert_eq!((r, m), (big(0), big(5)));
    }

    #[test]
    fn triple_against_exhaustive_scan() {
        // Oracle: scan 0..(7*9*2 - 1) for the unique solution.
        let mut expected = None;
        for x in 0..126i64 {
            if x % 7 == 3 && x % 9 == 4 && x % 2 == 0 {
                expected = Some(x);
                break;
            }
        }
        let expected = expected.unwrap();
        assert_eq!(expected, 94);
        let (r, m) = crt_solve(&[(big(3), big(7)), (big(4), big(9)), (big(0), big(2))]).unwrap();
        assert_eq!((r, m), (big(expected), big(126)));
    }

    #[test]
    fn consistent_overlap_merged() {
        let (r, m) = crt_solve(&[(big(2), big(4)), (big(0), big(2))]).unwrap();
        assert_eq!((r, m), (big(2), big(4)));
    }

    #[test]
    fn inconsistent_overlap_rejected() {
        assert!(crt_solve(&[(big(1), big(4)), (big(0), big(2))]).is_err());
    }

    #[test]
    fn output_satisfies_every_congruence() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let moduli = [2i64, 3, 5, 7, 11, 13];
            let k = rng.gen_range(2..=moduli.len());
            let system: Vec<(BigInt, BigInt)> = moduli[..k]
                .iter()
                .map(|&m| (big(rng.gen_range(0..m)), big(m)))
                .collect();
            let (r, m) = crt_solve(&system).unwrap();
            assert_eq!(m, system.iter().map(|(_, m)| m).product::<BigInt>());
            for (res, modulus) in &system {
                assert_eq!(&r.mod_floor(modulus), res);
            }
        }
    }
}
