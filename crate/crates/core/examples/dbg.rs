use num_bigint::BigInt;
use sqfdisc::pipeline::*;
fn main() {
    for r in [1usize, 3] {
        let mut t = GenerationTarget::new(3, r, (3 - r) / 2);
        t.record_budget = 300_000;
        t.q_max = 2;
        let checkpoints: Vec<BigInt> = [1_000u64, 10_000, 100_000, 1_000_000].iter().map(|&n| BigInt::from(n)).collect();
        let report = count_distinct_discriminants(&t, &checkpoints).unwrap();
        println!("n=3 r={} stats: {:?}", r, report.stats);
        println!("  checkpoints: {:?}", report.checkpoint_counts.iter().map(|(n,c)| (n.to_string(), *c)).collect::<Vec<_>>());
        println!("  fit: {:?}", report.exponent_fit);
        println!("  params a={:?} t={} interval={:?}", report.params.a.iter().map(|x| x.to_string()).collect::<Vec<_>>(), report.params.b_modulus, report.params.b_interval.as_ref().map(|iv| iv.to_string()));
    }
}
