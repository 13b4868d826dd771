//! Independent certification of every claimed property of an output
//! polynomial: squarefree discriminant (with a complete verified
//! factorization), coprimality to the avoided primes, irreducibility over the
//! rationals via a finite-field witness, exact real-root count, and
//! symmetric-group evidence from sampled factorization patterns.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmath::{
    factorize, is_prime, primality_is_deterministic, primes_up_to, EffortBudget, FactorOutcome,
    Factorization,
};
use crate::family::{FamilyParams, LinearFactorSystem};
use crate::polyarith::{
    discriminant, fp_factor_degrees, fp_is_irreducible, real_root_count, FpPoly, IntPoly,
};

/// Tri-state squarefree verdict carried by a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SquarefreeVerdict {
    True,
    False,
    Indeterminate,
}

/// Evidence that the Galois group is the full symmetric group: observed
/// factor-degree patterns (Frobenius cycle types) at sampled primes, and the
/// witnesses assembled from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnReport {
    pub sampled_primes: usize,
    /// cycle type -> number of sampled primes showing it
    pub observed_cycle_types: BTreeMap<Vec<usize>, usize>,
    pub jordan_certificate: Option<JordanCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JordanCertificate {
    /// Witness prime for the n-cycle type {n}.
    pub n_cycle: String,
    /// Witness prime for the transposition type {2, 1, ..., 1}.
    pub transposition: String,
    /// For n ≥ 8: witness prime for a p-cycle type {p, 1, ...} with prime
    /// p in (n/2, n-2).
    pub p_cycle: Option<String>,
    /// Which criterion fired: "transposition+n-cycle" (n ≤ 7) or
    /// "jordan-p-cycle" (n ≥ 8).
    pub criterion: String,
}

impl Serialize for SnReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SnReport", 3)?;
        st.serialize_field("sampled_primes", &self.sampled_primes)?;
        let types: Vec<(&Vec<usize>, &usize)> = self.observed_cycle_types.iter().collect();
        st.serialize_field("observed_cycle_types", &types)?;
        st.serialize_field("jordan_certificate", &self.jordan_certificate)?;
        st.end()
    }
}

/// One certified output: the polynomial, its independently recomputed
/// discriminant with a complete verified factorization, and every claimed
/// property re-established from scratch.
#[derive(Debug, Clone)]
pub struct DiscRecord {
    pub params: Option<FamilyParams>,
    pub b: BigInt,
    pub poly: IntPoly,
    pub disc: BigInt,
    pub disc_factorization: Option<Factorization>,
    pub squarefree: SquarefreeVerdict,
    pub coprime_to_avoided: bool,
    pub real_roots: usize,
    pub irreducibility_witness: Option<BigInt>,
    pub sn_evidence: Option<SnReport>,
    /// "deterministic" when every prime in the factorization was certified by
    /// the deterministic sub-2^64 test; otherwise the probabilistic bound.
    pub primality_certainty: &'static str,
}

impl Serialize for DiscRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DiscRecord", 11)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("poly", &self.poly)?;
        st.serialize_field("disc", &self.disc.to_string())?;
        match &self.disc_factorization {
            Some(f) => {
                let pairs: Vec<(String, u32)> =
                    f.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect();
                st.serialize_field("disc_sign", &f.sign)?;
                st.serialize_field("disc_factorization", &pairs)?;
            }
            None => {
                st.serialize_field("disc_sign", &self.disc.signum().to_string())?;
                st.serialize_field("disc_factorization", &Option::<Vec<(String, u32)>>::None)?;
            }
        }
        st.serialize_field("squarefree", &self.squarefree)?;
        st.serialize_field("coprime_to_avoided", &self.coprime_to_avoided)?;
        st.serialize_field("real_roots", &self.real_roots)?;
        st.serialize_field(
            "irreducibility_witness",
            &self.irreducibility_witness.as_ref().map(|p| p.to_string()),
        )?;
        st.serialize_field("sn_evidence", &self.sn_evidence)?;
        st.serialize_field("primality_certainty", &self.primality_certainty)?;
        st.end()
    }
}

/// Options for certification depth.
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub effort: EffortBudget,
    /// Scan bound for the irreducibility witness prime.
    pub witness_budget: u64,
    /// Number of primes sampled for symmetric-group evidence.
    pub sn_primes: usize,
    pub avoid: BTreeSet<BigInt>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            effort: EffortBudget::default(),
            witness_budget: 10_000,
            sn_primes: 40,
            avoid: BTreeSet::new(),
        }
    }
}

/// First prime p ≤ budget with p not dividing the discriminant and the
/// reduction mod p irreducible. Such a witness proves irreducibility over the
/// rationals; None is not a disproof.
pub fn irreducible_over_q(poly: &IntPoly, disc: &BigInt, witness_budget: u64) -> Option<BigInt> {
    if !poly.is_monic() {
        return None;
    }
    for p in primes_up_to(witness_budget) {
        let pb = BigInt::from(p);
        if !disc.is_zero() && disc.mod_floor(&pb).is_zero() {
            continue;
        }
        let f = FpPoly::from_int_poly(poly, &pb);
        if f.degree() != poly.degree() {
            continue;
        }
        if fp_is_irreducible(&f) {
            return Some(pb);
        }
    }
    None
}

/// Sample factor-degree patterns of the reduction modulo ascending primes not
/// dividing the discriminant, and assemble the symmetric-group certificate
/// when the required cycle types appear. Requires a nonzero discriminant and
/// an irreducibility witness (transitivity).
pub fn sn_evidence(poly: &IntPoly, disc: &BigInt, sn_primes: usize) -> Result<SnReport> {
    let n = poly
        .degree()
        .ok_or_else(|| Error::invalid("sn_evidence: zero polynomial"))?;
    if disc.is_zero() {
        return Err(Error::invalid("sn_evidence: discriminant must be nonzero"));
    }
    let mut observed: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut sampled = 0usize;
    let mut n_cycle_witness: Option<BigInt> = None;
    let mut transposition_witness: Option<BigInt> = None;
    let mut p_cycle_witness: Option<BigInt> = None;

    // For n ≥ 8 the certificate needs a prime-length cycle in (n/2, n-2).
    let midrange_primes: BTreeSet<usize> = primes_up_to((n.max(4) - 2) as u64)
        .into_iter()
        .map(|p| p as usize)
        .filter(|&p| 2 * p > n && p < n.saturating_sub(2))
        .collect();

    let transposition_type: Vec<usize> = {
        let mut t = vec![1usize; n.saturating_sub(2)];
        t.push(2);
        t.sort();
        t
    };

    let mut bound = 1u64 << 10;
    'outer: loop {
        for p in primes_up_to(bound) {
            if sampled >= sn_primes {
                break 'outer;
            }
            let pb = BigInt::from(p);
            if disc.mod_floor(&pb).is_zero() {
                continue;
            }
            let f = FpPoly::from_int_poly(poly, &pb);
            if f.degree() != Some(n) {
                continue;
            }
            // p coprime to the discriminant makes the reduction squarefree.
            let degrees = fp_factor_degrees(&f)?;
            sampled += 1;
            *observed.entry(degrees.clone()).or_insert(0) += 1;
            if degrees == vec![n] && n_cycle_witness.is_none() {
                n_cycle_witness = Some(pb.clone());
            }
            if degrees == transposition_type && transposition_witness.is_none() {
                transposition_witness = Some(pb.clone());
            }
            if p_cycle_witness.is_none() {
                let ones_and_p: Option<usize> = {
                    let non_ones: Vec<usize> =
                        degrees.iter().copied().filter(|&d| d != 1).collect();
                    if non_ones.len() == 1 && midrange_primes.contains(&non_ones[0]) {
                        Some(non_ones[0])
                    } else {
                        None
                    }
                };
                if ones_and_p.is_some() {
                    p_cycle_witness = Some(pb.clone());
                }
            }
        }
        if sampled >= sn_primes {
            break;
        }
        bound *= 2;
        if bound > 1 << 24 {
            break;
        }
    }

    let jordan_certificate = match (&n_cycle_witness, &transposition_witness) {
        (Some(nc), Some(tr)) if n <= 7 => Some(JordanCertificate {
            n_cycle: nc.to_string(),
            transposition: tr.to_string(),
            p_cycle: None,
            criterion: "transposition+n-cycle".into(),
        }),
        (Some(nc), Some(tr)) => p_cycle_witness.as_ref().map(|pc| JordanCertificate {
            n_cycle: nc.to_string(),
            transposition: tr.to_string(),
            p_cycle: Some(pc.to_string()),
            criterion: "jordan-p-cycle".into(),
        }),
        _ => None,
    };

    Ok(SnReport {
        sampled_primes: sampled,
        observed_cycle_types: observed,
        jordan_certificate,
    })
}

/// Factor the discriminant through the linear-factor values at b (plus the
/// sign), merging the per-factor factorizations. The merged product is
/// verified against the independently recomputed discriminant.
fn factor_disc_via_system(
    system: &LinearFactorSystem,
    b: &BigInt,
    disc: &BigInt,
    effort: &EffortBudget,
) -> Result<Option<Factorization>> {
    let mut counts: BTreeMap<BigInt, u32> = BTreeMap::new();
    let mut sign = system.sign;
    for f in system.factors.iter() {
        let v = f.eval(b);
        if v.is_zero() {
            return Ok(None);
        }
        if v.is_negative() {
            sign = -sign;
        }
        match factorize(&v, effort)? {
            FactorOutcome::Complete(part) => {
                for (p, e) in part.factors {
                    *counts.entry(p).or_insert(0) += e;
                }
            }
            FactorOutcome::Indeterminate { .. } => return Ok(None),
        }
    }
    let fact = Factorization {
        sign,
        factors: counts.into_iter().collect(),
    };
    if &fact.product() != disc {
        return Err(Error::CertificationFailure(format!(
            "merged factorization does not reproduce the discriminant at b = {b}"
        )));
    }
    Ok(Some(fact))
}

/// Certify one family member: every field is populated by independent
/// recomputation, and the product-formula discriminant is cross-checked
/// against the subresultant discriminant (hard failure on mismatch).
pub fn certify_record(
    params: &FamilyParams,
    b: &BigInt,
    opts: &CertifyOptions,
) -> Result<DiscRecord> {
    if !params.accepts_b(b) {
        return Err(Error::invalid(format!(
            "certify_record: b = {b} violates the congruence class or window"
        )));
    }
    let poly = params.polynomial(b)?;
    let disc = discriminant(&poly)?;
    let system = params.linear_system()?;
    let product = system.eval(b);
    if product != disc {
        return Err(Error::CertificationFailure(format!(
            "discriminant identity violated at b = {b}: subresultant {disc} vs product {product}"
        )));
    }
    certify_poly_with_system(Some(params.clone()), poly, b.clone(), disc, Some(&system), opts)
}

/// Certify an externally supplied monic integer polynomial (no family
/// context: the discriminant is factored directly).
pub fn certify_external(poly: &IntPoly, opts: &CertifyOptions) -> Result<DiscRecord> {
    if !poly.is_monic() {
        return Err(Error::invalid("verify: polynomial must be monic"));
    }
    let n = poly
        .degree()
        .ok_or_else(|| Error::invalid("verify: zero polynomial"))?;
    if n < 2 {
        return Err(Error::invalid("verify: degree must be ≥ 2"));
    }
    let disc = discriminant(poly)?;
    let b = poly.coeff(0);
    certify_poly_with_system(None, poly.clone(), b, disc, None, opts)
}

fn certify_poly_with_system(
    params: Option<FamilyParams>,
    poly: IntPoly,
    b: BigInt,
    disc: BigInt,
    system: Option<&LinearFactorSystem>,
    opts: &CertifyOptions,
) -> Result<DiscRecord> {
    let n = poly.degree().expect("nonzero");

    let disc_factorization = if disc.is_zero() {
        None
    } else {
        match system {
            Some(sys) => factor_disc_via_system(sys, &b, &disc, &opts.effort)?,
            None => match factorize(&disc, &opts.effort)? {
                FactorOutcome::Complete(f) => Some(f),
                FactorOutcome::Indeterminate { .. } => None,
            },
        }
    };

    let squarefree = if disc.is_zero() {
        SquarefreeVerdict::False
    } else {
        match &disc_factorization {
            Some(f) => {
                if f.is_squarefree() {
                    SquarefreeVerdict::True
                } else {
                    SquarefreeVerdict::False
                }
            }
            None => {
                // No complete factorization: a square divisor found by the
                // budgeted search still settles the question negatively.
                match crate::exactmath::is_squarefree(&disc, &opts.effort)? {
                    crate::exactmath::SquarefreeStatus::Squarefree => {
                        // Squarefree claims require the complete verified
                        // factorization; treat as indeterminate.
                        SquarefreeVerdict::Indeterminate
                    }
                    crate::exactmath::SquarefreeStatus::NotSquarefree => SquarefreeVerdict::False,
                    crate::exactmath::SquarefreeStatus::Indeterminate => {
                        SquarefreeVerdict::Indeterminate
                    }
                }
            }
        }
    };

    // Squarefree claims must rest on a complete verified factorization.
    if squarefree == SquarefreeVerdict::True {
        let f = disc_factorization.as_ref().expect("complete factorization");
        debug_assert!(f.verify(&disc));
    }

    let coprime_to_avoided = opts
        .avoid
        .iter()
        .all(|p| !disc.is_zero() && !disc.mod_floor(p).is_zero());

    let real_roots = real_root_count(&poly, None)?;
    if !disc.is_zero() && (n + real_roots) % 2 != 0 {
        return Err(Error::CertificationFailure(format!(
            "real-root parity violated: degree {n}, {real_roots} real roots"
        )));
    }

    let irreducibility_witness = irreducible_over_q(&poly, &disc, opts.witness_budget);
    let sn_evidence = if irreducibility_witness.is_some() && !disc.is_zero() {
        Some(sn_evidence(&poly, &disc, opts.sn_primes)?)
    } else {
        None
    };

    let primality_certainty = match &disc_factorization {
        Some(f) if !f.all_primes_deterministic() => "probabilistic<2^-128",
        _ => "deterministic",
    };

    Ok(DiscRecord {
        params,
        b,
        poly,
        disc,
        disc_factorization,
        squarefree,
        coprime_to_avoided,
        real_roots,
        irreducibility_witness,
        sn_evidence,
        primality_certainty,
    })
}

impl DiscRecord {
    /// Whether the record certifies the full property bundle: squarefree
    /// discriminant, coprime to the avoided primes, irreducible with a
    /// witness.
    pub fn fully_certified(&self) -> bool {
        self.squarefree == SquarefreeVerdict::True
            && self.coprime_to_avoided
            && self.irreducibility_witness.is_some()
    }

    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::IntPoly;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn family_n2_a2() -> FamilyParams {
        FamilyParams {
            n: 2,
            a: vec![BigInt::from(2)],
            b_residue: BigInt::zero(),
            b_modulus: BigInt::one(),
            b_interval: None,
            q: BigInt::one(),
        }
    }

    #[test]
    fn witness_examples() {
        // x^2 + 1: disc -4; witness 3 (2 divides the discriminant).
        let poly = p(&[1, 0, 1]);
        let disc = discriminant(&poly).unwrap();
        assert_eq!(
            irreducible_over_q(&poly, &disc, 1000),
            Some(BigInt::from(3))
        );
        // x^2 - 1 is reducible: no witness at any budget.
        let poly = p(&[-1, 0, 1]);
        let disc = discriminant(&poly).unwrap();
        assert_eq!(irreducible_over_q(&poly, &disc, 1000), None);
    }

    #[test]
    fn sn_evidence_quadratic_and_cubic() {
        // x^2 + 1: both types {2} and {1,1} occur among small primes.
        let poly = p(&[1, 0, 1]);
        let disc = discriminant(&poly).unwrap();
        let rep = sn_evidence(&poly, &disc, 20).unwrap();
        assert!(rep.observed_cycle_types.contains_key(&vec![2]));
        assert!(rep.observed_cycle_types.contains_key(&vec![1, 1]));
        let cert = rep.jordan_certificate.unwrap();
        assert_eq!(cert.criterion, "transposition+n-cycle");

        // x^3 - x - 1 (disc -23): types {3}, {1,2}, {1,1,1} all appear.
        let poly = p(&[-1, -1, 0, 1]);
        let disc = discriminant(&poly).unwrap();
        assert_eq!(disc, BigInt::from(-23));
        let rep = sn_evidence(&poly, &disc, 60).unwrap();
        assert!(rep.observed_cycle_types.contains_key(&vec![3]));
        assert!(rep.observed_cycle_types.contains_key(&vec![1, 2]));
        assert!(rep.observed_cycle_types.contains_key(&vec![1, 1, 1]));
        assert!(rep.jordan_certificate.is_some());
        // Every recorded cycle type sums to n.
        for (t, _) in rep.observed_cycle_types {
            assert_eq!(t.iter().sum::<usize>(), 3);
        }
    }

    #[test]
    fn certify_known_family_members() {
        let params = family_n2_a2();
        let opts = CertifyOptions::default();
        // b=5: x^2-2x+5, disc = -16 = -(2^4): not squarefree.
        let rec = certify_record(&params, &BigInt::from(5), &opts).unwrap();
        assert_eq!(rec.disc, BigInt::from(-16));
        assert_eq!(rec.squarefree, SquarefreeVerdict::False);
        assert_eq!(rec.real_roots, 0);
        // b=2: disc = -4: not squarefree. b=3: disc = -8: not squarefree.
        let rec = certify_record(&params, &BigInt::from(2), &opts).unwrap();
        assert_eq!(rec.disc, BigInt::from(-4));
        assert_eq!(rec.squarefree, SquarefreeVerdict::False);
        let rec = certify_record(&params, &BigInt::from(3), &opts).unwrap();
        assert_eq!(rec.disc, BigInt::from(-8));
        assert_eq!(rec.squarefree, SquarefreeVerdict::False);
        // b=0: disc = 4-0 = 4 -> wait, disc(x^2-2x) = 4: not squarefree.
        // b=-1: disc(x^2-2x-1) = 4+4 = 8: not squarefree.
        // degenerate b=1: disc = 0, real roots of the reduced polynomial.
        let rec = certify_record(&params, &BigInt::from(1), &opts).unwrap();
        assert_eq!(rec.disc, BigInt::zero());
        assert_eq!(rec.squarefree, SquarefreeVerdict::False);
        assert_eq!(rec.real_roots, 1); // (x-1)^2 has one distinct root
        assert!(rec.disc_factorization.is_none());
    }

    #[test]
    fn certify_squarefree_member() {
        // a=(1): x^2 - x + b, disc = 1 - 4b; b = -1 gives disc 5 (squarefree).
        let params = FamilyParams {
            n: 2,
            a: vec![BigInt::one()],
            b_residue: BigInt::zero(),
            b_modulus: BigInt::one(),
            b_interval: None,
            q: BigInt::one(),
        };
        let opts = CertifyOptions::default();
        let rec = certify_record(&params, &BigInt::from(-1), &opts).unwrap();
        assert_eq!(rec.disc, BigInt::from(5));
        assert_eq!(rec.squarefree, SquarefreeVerdict::True);
        assert!(rec.fully_certified());
        assert_eq!(rec.real_roots, 2);
        let f = rec.disc_factorization.unwrap();
        assert_eq!(f.factors, vec![(BigInt::from(5), 1)]);
        assert_eq!(rec.primality_certainty, "deterministic");
    }

    #[test]
    fn congruence_violation_rejected() {
        let params = FamilyParams {
            b_modulus: BigInt::from(2),
            b_residue: BigInt::one(),
            ..family_n2_a2()
        };
        assert!(certify_record(&params, &BigInt::from(2), &CertifyOptions::default()).is_err());
        assert!(certify_record(&params, &BigInt::from(3), &CertifyOptions::default()).is_ok());
    }

    #[test]
    fn external_certification() {
        let opts = CertifyOptions {
            avoid: [BigInt::from(2), BigInt::from(5)].into_iter().collect(),
            ..CertifyOptions::default()
        };
        // x^3 - x - 1: disc -23, squarefree, coprime to {2,5}, 1 real root.
        let rec = certify_external(&p(&[-1, -1, 0, 1]), &opts).unwrap();
        assert!(rec.fully_certified());
        assert_eq!(rec.real_roots, 1);
        assert_eq!(rec.b, BigInt::from(-1));
        // x^2 - 1: reducible, disc 4 = 2^2.
        let rec = certify_external(&p(&[-1, 0, 1]), &opts).unwrap();
        assert!(!rec.fully_certified());
        assert_eq!(rec.squarefree, SquarefreeVerdict::False);
        assert!(rec.irreducibility_witness.is_none());
        // Non-monic rejected.
        assert!(certify_external(&p(&[1, 0, 2]), &opts).is_err());
    }

    #[test]
    fn jsonl_shape() {
        let rec = certify_external(&p(&[-1, -1, 0, 1]), &CertifyOptions::default()).unwrap();
        let line = rec.to_jsonl();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["disc"], "-23");
        assert_eq!(v["squarefree"], "true");
        assert_eq!(v["disc_factorization"][0][0], "23");
        assert!(v["params"].is_null());
    }
}
