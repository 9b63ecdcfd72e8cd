//! Differential campaign: the sparse evaluator against the dense oracle on
//! ten thousand generated cases.

use aramat_core::harness::{fuzz_oracle, GenConfig, GenValue};
use aramat_core::semiring::{Boolean, Integer, Mat2, Natural, Provenance, Tropical};

fn campaign<K: GenValue>(seed: u64, count: usize) {
    for k in 1..=3 {
        let cfg = GenConfig {
            max_depth: 5,
            max_schema_arity: k,
            ..GenConfig::with_seed(seed + k as u64)
        };
        let rep = fuzz_oracle::<K>(&cfg, count, k).unwrap();
        assert_eq!(rep.cases, count);
        if let Some(f) = rep.failures.first() {
            panic!("case {} over {}: {} on {}", f.case, K::NAME, f.expr, f.message);
        }
    }
}

#[test]
fn naturals() {
    campaign::<Natural>(100, 700);
}

#[test]
fn integers() {
    campaign::<Integer>(200, 700);
}

#[test]
fn booleans() {
    campaign::<Boolean>(300, 500);
}

#[test]
fn tropical() {
    campaign::<Tropical>(400, 500);
}

#[test]
fn provenance() {
    campaign::<Provenance>(500, 500);
}

#[test]
fn two_by_two_matrices() {
    campaign::<Mat2>(600, 500);
}
