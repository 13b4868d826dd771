//! End-to-end orchestration: certificate search, parameter assembly,
//! signature scaling, scanning of the admissible constant terms, per-record
//! certification, deduplication, and density/count reporting.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::certify::{certify_record, CertifyOptions, DiscRecord, SquarefreeVerdict};
use crate::error::{Error, Result};
use crate::exactmath::EffortBudget;
use crate::family::{FamilyParams, LinearFactorSystem};
use crate::paramsearch::{
    build_certificate, find_signature_direction, scale_params, ParamCertificate, SignatureRegion,
};
use crate::polyarith::{discriminant, Endpoint, OpenInterval};
use crate::sieve::{build_profile, SieveOptions, SieveVariant};

/// What to generate: degree, signature, avoided primes, and scan budgets.
#[derive(Debug, Clone)]
pub struct GenerationTarget {
    pub n: usize,
    pub real_roots: usize,
    pub complex_pairs: usize,
    pub avoid: BTreeSet<BigInt>,
    /// Optional bound on |disc| for counting runs.
    pub disc_bound: Option<BigInt>,
    /// Number of records to emit (generate) or scan (count).
    pub record_budget: u64,
    /// Largest schedule index j for the scales q_j = 1 + j*M.
    pub q_max: u64,
    pub seed: u64,
    /// Prime-scan bound for the searches.
    pub scan_limit: usize,
}

impl GenerationTarget {
    pub fn new(n: usize, real_roots: usize, complex_pairs: usize) -> Self {
        GenerationTarget {
            n,
            real_roots,
            complex_pairs,
            avoid: BTreeSet::new(),
            disc_bound: None,
            record_budget: 10,
            q_max: 8,
            seed: 0,
            scan_limit: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("target: degree must be ≥ 2"));
        }
        if self.real_roots + 2 * self.complex_pairs != self.n {
            return Err(Error::invalid(format!(
                "target: signature ({}, {}) incompatible with degree {} (need r + 2s = n)",
                self.real_roots, self.complex_pairs, self.n
            )));
        }
        Ok(())
    }
}

/// Integer members of a congruence class inside an open interval, yielded in
/// (|b|, b) order (the negative of a tied pair first).
struct ClassMemberIter {
    modulus: BigInt,
    up: Option<BigInt>,
    down: Option<BigInt>,
    hi: Option<BigInt>,
    lo: Option<BigInt>,
}

fn strict_above(lo: &Endpoint) -> Option<BigInt> {
    match lo {
        Endpoint::NegInf => None,
        Endpoint::PosInf => unreachable!("empty interval"),
        Endpoint::Finite(r) => Some(r.floor().to_integer() + 1),
    }
}

fn strict_below(hi: &Endpoint) -> Option<BigInt> {
    match hi {
        Endpoint::PosInf => None,
        Endpoint::NegInf => unreachable!("empty interval"),
        Endpoint::Finite(r) => Some(r.ceil().to_integer() - 1),
    }
}

impl ClassMemberIter {
    fn new(residue: &BigInt, modulus: &BigInt, interval: Option<&OpenInterval>) -> Self {
        let (lo, hi) = match interval {
            None => (None, None),
            Some(iv) => (strict_above(&iv.lo), strict_below(&iv.hi)),
        };
        // First class member at or above x: x + ((residue - x) mod t).
        let first_at_or_above = |x: &BigInt| -> BigInt { x + (residue - x).mod_floor(modulus) };
        let last_at_or_below = |x: &BigInt| -> BigInt { x - (x - residue).mod_floor(modulus) };

        let up_start = match &lo {
            Some(l) if l > &BigInt::zero() => l.clone(),
            _ => BigInt::zero(),
        };
        let mut up = Some(first_at_or_above(&up_start));
        if let (Some(u), Some(h)) = (&up, &hi) {
            if u > h {
                up = None;
            }
        }
        let down_start = match &hi {
            Some(h) if h < &BigInt::from(-1) => h.clone(),
            _ => BigInt::from(-1),
        };
        let mut down = Some(last_at_or_below(&down_start));
        if let (Some(d), Some(l)) = (&down, &lo) {
            if d < l {
                down = None;
            }
        }
        ClassMemberIter {
            modulus: modulus.clone(),
            up,
            down,
            hi,
            lo,
        }
    }

    fn kill_up(&mut self) {
        self.up = None;
    }

    fn kill_down(&mut self) {
        self.down = None;
    }

    fn is_done(&self) -> bool {
        self.up.is_none() && self.down.is_none()
    }
}

impl Iterator for ClassMemberIter {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let take_up = match (&self.up, &self.down) {
            (None, None) => return None,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(u), Some(d)) => u.abs() < d.abs(), // tie -> negative first
        };
        if take_up {
            let u = self.up.take().unwrap();
            let next = &u + &self.modulus;
            self.up = match &self.hi {
                Some(h) if &next > h => None,
                _ => Some(next),
            };
            Some(u)
        } else {
            let d = self.down.take().unwrap();
            let next = &d - &self.modulus;
            self.down = match &self.lo {
                Some(l) if &next < l => None,
                _ => Some(next),
            };
            Some(d)
        }
    }
}

/// Aggregate tallies for a scan.
#[derive(Debug, Clone, Default)]
pub struct ScanStats {
    pub records_scanned: u64,
    pub squarefree_count: u64,
    pub not_squarefree_count: u64,
    pub indeterminate_count: u64,
    pub emitted: u64,
}

/// Report of a counting or density run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub params: FamilyParams,
    pub stats: ScanStats,
    /// Distinct squarefree discriminant values seen (within the bound, when
    /// one was given).
    pub distinct_discriminants: u64,
    /// (checkpoint N, count of distinct squarefree |disc| ≤ N).
    pub checkpoint_counts: Vec<(BigInt, u64)>,
    pub empirical_density: Option<BigRational>,
    pub predicted_density: Option<(BigRational, BigRational)>,
    /// Least-squares slope of log(count) against log(N) over checkpoints
    /// with a positive count; requires ≥ 4 such points.
    pub exponent_fit: Option<f64>,
}

/// The full generation pipeline: searches run once, then the admissible
/// constant terms are scanned in (q, |b|, b) order and each record is
/// independently certified before emission.
pub struct Pipeline {
    pub target: GenerationTarget,
    pub certificate: ParamCertificate,
    pub region: SignatureRegion,
    certify_opts: CertifyOptions,
    q_index: u64,
    current: Option<QScan>,
    pub skipped_q: Vec<(BigInt, String)>,
    stats: ScanStats,
    disc_multiplicity: BTreeMap<BigInt, u32>,
}

struct QScan {
    params: FamilyParams,
    system: LinearFactorSystem,
    members: ClassMemberIter,
}

const CERTIFY_BATCH: usize = 16;

impl Pipeline {
    pub fn new(target: GenerationTarget) -> Result<Self> {
        target.validate()?;
        let certificate = build_certificate(target.n, &target.avoid, target.scan_limit, target.seed)?;
        certificate.verify()?;
        let region =
            find_signature_direction(target.n, target.real_roots, &certificate, 8192)?;
        let certify_opts = CertifyOptions {
            effort: EffortBudget::default(),
            witness_budget: 10_000,
            sn_primes: 32,
            avoid: target.avoid.clone(),
        };
        let mut pipeline = Pipeline {
            target,
            certificate,
            region,
            certify_opts,
            q_index: 0,
            current: None,
            skipped_q: vec![],
            stats: ScanStats::default(),
            disc_multiplicity: BTreeMap::new(),
        };
        pipeline.advance_q()?;
        Ok(pipeline)
    }

    pub fn stats(&self) -> &ScanStats {
        &self.stats
    }

    pub fn disc_multiplicities(&self) -> &BTreeMap<BigInt, u32> {
        &self.disc_multiplicity
    }

    fn advance_q(&mut self) -> Result<bool> {
        while self.q_index <= self.target.q_max {
            let q = BigInt::one() + BigInt::from(self.q_index) * &self.certificate.assembled_modulus;
            self.q_index += 1;
            let params = scale_params(&self.region, &self.certificate, &q)?;
            // The window must be wide enough to contain a class member.
            if let Some(iv) = &params.b_interval {
                if let Some(w) = iv.width() {
                    if w <= BigRational::from(params.b_modulus.clone()) {
                        self.skipped_q.push((
                            q.clone(),
                            format!(
                                "window width {w} does not exceed the class modulus {}",
                                params.b_modulus
                            ),
                        ));
                        continue;
                    }
                }
            }
            let system = params.linear_system()?;
            let members = ClassMemberIter::new(
                &params.b_residue,
                &params.b_modulus,
                params.b_interval.as_ref(),
            );
            self.current = Some(QScan {
                params,
                system,
                members,
            });
            return Ok(true);
        }
        self.current = None;
        Ok(false)
    }

    /// Next batch of candidate b values in canonical order.
    fn next_candidates(&mut self) -> Result<Vec<BigInt>> {
        loop {
            let Some(scan) = self.current.as_mut() else {
                return Ok(vec![]);
            };
            let batch: Vec<BigInt> = scan.members.by_ref().take(CERTIFY_BATCH).collect();
            if !batch.is_empty() {
                return Ok(batch);
            }
            if !self.advance_q()? {
                return Ok(vec![]);
            }
        }
    }

    /// Emit the next fully certified record, or None when the schedule is
    /// exhausted.
    pub fn next_record(&mut self) -> Result<Option<DiscRecord>> {
        loop {
            let batch = self.next_candidates()?;
            if batch.is_empty() {
                return Ok(None);
            }
            let scan = self.current.as_ref().expect("active scan");
            let params = scan.params.clone();
            let opts = self.certify_opts.clone();
            let results: Vec<Result<DiscRecord>> = batch
                .par_iter()
                .map(|b| certify_record(&params, b, &opts))
                .collect();
            for rec in results {
                let rec = rec?;
                self.stats.records_scanned += 1;
                match rec.squarefree {
                    SquarefreeVerdict::True => {
                        self.stats.squarefree_count += 1;
                        *self
                            .disc_multiplicity
                            .entry(rec.disc.clone())
                            .or_insert(0) += 1;
                    }
                    SquarefreeVerdict::False => self.stats.not_squarefree_count += 1,
                    SquarefreeVerdict::Indeterminate => self.stats.indeterminate_count += 1,
                }
                // Inside the window the real-root count must equal the target.
                if rec.real_roots != self.target.real_roots {
                    return Err(Error::CertificationFailure(format!(
                        "record at b = {} has {} real roots, target {}",
                        rec.b, rec.real_roots, self.target.real_roots
                    )));
                }
                if rec.fully_certified() {
                    self.stats.emitted += 1;
                    return Ok(Some(rec));
                }
            }
        }
    }

    /// Collect up to `budget` certified records.
    pub fn collect_records(&mut self, budget: u64) -> Result<Vec<DiscRecord>> {
        let mut out = Vec::new();
        while (out.len() as u64) < budget {
            match self.next_record()? {
                Some(r) => out.push(r),
                None => break,
            }
        }
        Ok(out)
    }
}

/// Ordinary-least-squares slope of ln(count) against ln(N).
fn fit_exponent(points: &[(BigInt, u64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(n, c)| (n.to_f64().unwrap().ln(), (*c as f64).ln()))
        .collect();
    if usable.len() < 4 {
        return None;
    }
    let k = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(x, _)| x).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let denom = k * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((k * sxy - sx * sy) / denom)
}

/// Scan for distinct squarefree discriminants below each checkpoint. The scan
/// walks the schedule in canonical order, retiring a scan direction once it
/// is past every factor root with |disc| above the largest checkpoint, and
/// stopping when the schedule saturates or the budget runs out.
pub fn count_distinct_discriminants(
    target: &GenerationTarget,
    checkpoints: &[BigInt],
) -> Result<RunReport> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("count: checkpoints must be increasing"));
    }
    let max_bound = checkpoints.last().unwrap().clone();
    let mut pipeline = Pipeline::new(target.clone())?;
    let effort = EffortBudget::default();

    let mut distinct: BTreeSet<BigInt> = BTreeSet::new();
    let mut stats = ScanStats::default();
    let report_params;

    'schedule: loop {
        let Some(scan) = pipeline.current.as_mut() else {
            break;
        };
        let system = scan.system.clone();
        let params = scan.params.clone();
        // Scan directions die once beyond all roots with |disc| too large.
        let roots: Vec<BigRational> = system.factors.iter().map(|f| f.root()).collect();
        let root_hi = roots.iter().max().cloned().unwrap();
        let root_lo = roots.iter().min().cloned().unwrap();
        let mut contributed = false;
        let mut q_distinct: BTreeSet<BigInt> = BTreeSet::new();
        let mut q_squarefree = 0u64;
        loop {
            if stats.records_scanned >= target.record_budget {
                break 'schedule;
            }
            let Some(b) = scan.members.next() else {
                break;
            };
            let disc = system.eval(&b);
            let b_rat = BigRational::from(b.clone());
            if disc.abs() > max_bound {
                if b_rat > root_hi && b.is_positive() {
                    scan.members.kill_up();
                }
                if b_rat < root_lo && b.is_negative() {
                    scan.members.kill_down();
                }
                if scan.members.is_done() {
                    break;
                }
                continue;
            }
            stats.records_scanned += 1;
            // Cross-check the product formula against the subresultant
            // discriminant before trusting the value.
            let poly = params.polynomial(&b)?;
            let direct = discriminant(&poly)?;
            if direct != disc {
                return Err(Error::CertificationFailure(format!(
                    "discriminant identity violated at b = {b}"
                )));
            }
            if disc.is_zero() {
                stats.not_squarefree_count += 1;
                continue;
            }
            match crate::exactmath::is_squarefree(&disc, &effort)? {
                crate::exactmath::SquarefreeStatus::Squarefree => {
                    stats.squarefree_count += 1;
                    q_squarefree += 1;
                    q_distinct.insert(disc.clone());
                    distinct.insert(disc);
                    contributed = true;
                }
                crate::exactmath::SquarefreeStatus::NotSquarefree => {
                    stats.not_squarefree_count += 1
                }
                crate::exactmath::SquarefreeStatus::Indeterminate => {
                    stats.indeterminate_count += 1
                }
            }
        }
        // Multiplicity bound per family: b -> disc is at most (n-1)-to-one,
        // so within one scale the distinct count bounds the squarefree count.
        if (q_distinct.len() as u64) * (target.n as u64 - 1) < q_squarefree {
            return Err(Error::CertificationFailure(
                "multiplicity bound violated: too few distinct discriminants".into(),
            ));
        }
        // Advance the schedule; stop once a scale contributes nothing.
        let was_contributing = contributed;
        if !pipeline.advance_q()? {
            break;
        }
        if !was_contributing && pipeline.q_index > 1 {
            break;
        }
    }
    report_params = match pipeline.current.as_ref() {
        Some(scan) => scan.params.clone(),
        None => scale_params(&pipeline.region, &pipeline.certificate, &BigInt::one())?,
    };

    let checkpoint_counts: Vec<(BigInt, u64)> = checkpoints
        .iter()
        .map(|n| {
            let c = distinct.iter().filter(|d| d.abs() <= *n).count() as u64;
            (n.clone(), c)
        })
        .collect();
    let exponent_fit = fit_exponent(&checkpoint_counts);
    let distinct_count = distinct.len() as u64;

    Ok(RunReport {
        params: report_params,
        stats,
        distinct_discriminants: distinct_count,
        checkpoint_counts,
        empirical_density: None,
        predicted_density: None,
        exponent_fit,
    })
}

/// Empirical squarefree fraction among the first `scan_length` admissible b,
/// against the truncated local-density product of the congruence-substituted
/// system (indeterminates are excluded from numerator and denominator).
pub fn density_report(
    params: &FamilyParams,
    scan_length: u64,
    cutoff: u64,
) -> Result<RunReport> {
    let system = params.linear_system()?;
    let effort = EffortBudget::default();
    let members = ClassMemberIter::new(
        &params.b_residue,
        &params.b_modulus,
        params.b_interval.as_ref(),
    );

    let candidates: Vec<BigInt> = members.take(scan_length as usize).collect();
    let verdicts: Vec<(BigInt, SquarefreeVerdict)> = candidates
        .par_iter()
        .map(|b| -> Result<(BigInt, SquarefreeVerdict)> {
            let disc = system.eval(b);
            let poly = params.polynomial(b)?;
            let direct = discriminant(&poly)?;
            if direct != disc {
                return Err(Error::CertificationFailure(format!(
                    "discriminant identity violated at b = {b}"
                )));
            }
            if disc.is_zero() {
                return Ok((disc, SquarefreeVerdict::False));
            }
            let v = match crate::exactmath::is_squarefree(&disc, &effort)? {
                crate::exactmath::SquarefreeStatus::Squarefree => SquarefreeVerdict::True,
                crate::exactmath::SquarefreeStatus::NotSquarefree => SquarefreeVerdict::False,
                crate::exactmath::SquarefreeStatus::Indeterminate => {
                    SquarefreeVerdict::Indeterminate
                }
            };
            Ok((disc, v))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut stats = ScanStats::default();
    let mut distinct: BTreeSet<BigInt> = BTreeSet::new();
    for (disc, v) in &verdicts {
        stats.records_scanned += 1;
        match v {
            SquarefreeVerdict::True => {
                stats.squarefree_count += 1;
                distinct.insert(disc.clone());
            }
            SquarefreeVerdict::False => stats.not_squarefree_count += 1,
            SquarefreeVerdict::Indeterminate => stats.indeterminate_count += 1,
        }
    }

    let denominator = stats.records_scanned - stats.indeterminate_count;
    let empirical = if denominator > 0 {
        Some(BigRational::new(
            BigInt::from(stats.squarefree_count),
            BigInt::from(denominator),
        ))
    } else {
        None
    };

    let substituted = system.substitute_congruence(&params.b_residue, &params.b_modulus);
    let profile = build_profile(
        &substituted,
        SieveVariant::Univariate,
        cutoff,
        &SieveOptions::default(),
    )?;

    Ok(RunReport {
        params: params.clone(),
        stats,
        distinct_discriminants: distinct.len() as u64,
        checkpoint_counts: vec![],
        empirical_density: empirical,
        predicted_density: Some((profile.product_lower, profile.product_upper)),
        exponent_fit: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(n: usize, r: usize, avoid: &[i64]) -> GenerationTarget {
        let mut t = GenerationTarget::new(n, r, (n - r) / 2);
        t.avoid = avoid.iter().map(|&p| BigInt::from(p)).collect();
        t
    }

    #[test]
    fn class_member_order() {
        // residue 1 mod 3, no interval: 1, -2, 4, -5, 7, ...
        let it = ClassMemberIter::new(&BigInt::one(), &BigInt::from(3), None);
        let got: Vec<i64> = it.take(6).map(|b| b.to_i64().unwrap()).collect();
        assert_eq!(got, vec![1, -2, 4, -5, 7, -8]);
        // bounded window
        let iv = OpenInterval::bounded(
            BigRational::from(BigInt::from(-4)),
            BigRational::from(BigInt::from(8)),
        );
        let it = ClassMemberIter::new(&BigInt::one(), &BigInt::from(3), Some(&iv));
        let got: Vec<i64> = it.map(|b| b.to_i64().unwrap()).collect();
        assert_eq!(got, vec![1, -2, 4, 7]);
        // entirely positive window away from zero
        let iv = OpenInterval::bounded(
            BigRational::from(BigInt::from(100)),
            BigRational::from(BigInt::from(110)),
        );
        let it = ClassMemberIter::new(&BigInt::one(), &BigInt::from(3), Some(&iv));
        let got: Vec<i64> = it.map(|b| b.to_i64().unwrap()).collect();
        assert_eq!(got, vec![103, 106, 109]);
        // entirely negative window
        let iv = OpenInterval::bounded(
            BigRational::from(BigInt::from(-110)),
            BigRational::from(BigInt::from(-100)),
        );
        let it = ClassMemberIter::new(&BigInt::one(), &BigInt::from(3), Some(&iv));
        let got: Vec<i64> = it.map(|b| b.to_i64().unwrap()).collect();
        assert_eq!(got, vec![-101, -104, -107]);
    }

    #[test]
    fn generate_small_batches() {
        // n=2, (r,s)=(0,1): every record has 0 real roots and negative
        // squarefree discriminant.
        let mut pl = Pipeline::new(target(2, 0, &[])).unwrap();
        let recs = pl.collect_records(10).unwrap();
        assert_eq!(recs.len(), 10);
        for r in &recs {
            assert!(r.fully_certified());
            assert_eq!(r.real_roots, 0);
            assert!(r.disc.is_negative());
            let again = certify_record(
                r.params.as_ref().unwrap(),
                &r.b,
                &CertifyOptions::default(),
            )
            .unwrap();
            assert_eq!(again.disc, r.disc);
            assert_eq!(again.squarefree, SquarefreeVerdict::True);
        }
    }

    #[test]
    fn generate_with_avoid_set() {
        let mut pl = Pipeline::new(target(3, 3, &[2, 5])).unwrap();
        let recs = pl.collect_records(5).unwrap();
        assert_eq!(recs.len(), 5);
        let ten = BigInt::from(10);
        for r in &recs {
            assert_eq!(r.real_roots, 3);
            assert!(r.fully_certified());
            assert_eq!(r.disc.gcd(&ten), BigInt::one());
        }
    }

    #[test]
    fn invalid_parity_rejected() {
        let t = GenerationTarget::new(3, 2, 1);
        assert!(t.validate().is_err());
        assert!(Pipeline::new(t).is_err());
    }

    #[test]
    fn determinism_of_stream() {
        let run = || -> Vec<String> {
            let mut pl = Pipeline::new(target(2, 2, &[3])).unwrap();
            pl.collect_records(8)
                .unwrap()
                .iter()
                .map(|r| r.to_jsonl())
                .collect()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn count_n2_grows() {
        let mut t = target(2, 0, &[]);
        t.record_budget = 200_000;
        t.q_max = 2;
        let checkpoints: Vec<BigInt> = [1_000u64, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| BigInt::from(n))
            .collect();
        let report = count_distinct_discriminants(&t, &checkpoints).unwrap();
        let counts: Vec<u64> = report.checkpoint_counts.iter().map(|(_, c)| *c).collect();
        assert!(counts.windows(2).all(|w| w[0] < w[1]), "counts {counts:?}");
        let slope = report.exponent_fit.unwrap();
        assert!(slope > 0.7 && slope < 1.3, "slope {slope}");
    }

    #[test]
    fn density_report_n2() {
        let cert = build_certificate(2, &BTreeSet::new(), 10_000, 0).unwrap();
        let region = find_signature_direction(2, 0, &cert, 1024).unwrap();
        let mut params = scale_params(&region, &cert, &BigInt::one()).unwrap();
        params.b_interval = None; // scan the whole class for the density
        let report = density_report(&params, 2000, 200).unwrap();
        let f = report.empirical_density.unwrap().to_f64().unwrap();
        let (lo, hi) = report.predicted_density.unwrap();
        let (lo, hi) = (lo.to_f64().unwrap(), hi.to_f64().unwrap());
        let sigma = (f * (1.0 - f) / 2000.0).sqrt();
        assert!(
            f >= lo - 3.0 * sigma && f <= hi + 3.0 * sigma,
            "f = {f}, bracket = [{lo}, {hi}], sigma = {sigma}"
        );
    }
}
