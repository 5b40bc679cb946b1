use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use tmspace_core::analyzer::{classify_complexity, determinant_prefix, halting_pattern};
use tmspace_core::compare::{match_functions, speedup_stats};
use tmspace_core::harness::{default_inputs, run_machine, BatchSpec};
use tmspace_core::pipeline::{analyze_space, cleanse_machine, SpaceAnalysis, VerifyPolicy};
use tmspace_core::rulecodec::SpaceParams;

fn space22() -> SpaceAnalysis {
    analyze_space(&BatchSpec::new(SpaceParams::binary(2)), VerifyPolicy::PredictOnly, 2).unwrap()
}

#[test]
fn functions_and_algorithms_partition_the_space() {
    let c = space22().catalog;
    let by_fn: u64 = c.functions.iter().map(|f| f.members.len() as u64).sum();
    let by_alg: u64 = c.algorithms.iter().map(|a| a.members.len() as u64).sum();
    assert_eq!((by_fn, by_alg), (4096, 4096));
    let mut seen = BTreeSet::new();
    for f in &c.functions {
        for &m in &f.members {
            assert!(seen.insert(m), "rule {m} in two functions");
        }
        for &i in &f.algorithms {
            assert_eq!(c.algorithms[i].outputs, f.outputs);
        }
    }
    assert_eq!(seen.len(), 4096);
}

#[test]
fn definable_set_witnesses_and_complements() {
    let c = space22().catalog;
    let p = SpaceParams::binary(2);
    let inputs = default_inputs();
    let all: BTreeSet<u32> = inputs.iter().copied().collect();
    let sets: BTreeSet<Vec<u32>> = c.definable_sets.iter().map(|s| s.inputs.clone()).collect();
    for s in &c.definable_sets {
        for &w in s.witnesses.iter().take(20) {
            let runs = run_machine(p, w, &inputs, 1000, true);
            let (m, _) = cleanse_machine(p, &inputs, &runs, VerifyPolicy::PredictOnly);
            let set: Vec<u32> = halting_pattern(&m)
                .iter()
                .zip(&inputs)
                .filter(|(h, _)| **h)
                .map(|(_, &i)| i)
                .collect();
            assert_eq!(set, s.inputs, "witness {w}");
        }
        let own: BTreeSet<u32> = s.inputs.iter().copied().collect();
        let complement: Vec<u32> = all.difference(&own).copied().collect();
        assert_eq!(sets.contains(&complement), s.complement_definable);
    }
}

#[test]
fn prefix_is_minimal_on_the_real_space() {
    let c = space22().catalog;
    let p = determinant_prefix(&c.functions);
    let distinct = |l: usize| {
        c.functions
            .iter()
            .map(|f| f.outputs[..l].to_vec())
            .collect::<BTreeSet<_>>()
            .len()
    };
    assert_eq!(distinct(p.length), c.functions.len());
    assert!(distinct(p.length - 1) < c.functions.len());
}

#[test]
fn reports_are_deterministic() {
    let a = space22();
    let b = space22();
    assert_eq!(a.catalog, b.catalog);
    assert_eq!(a.raw_histogram, b.raw_histogram);
    let ra = speedup_stats(&match_functions(&a.catalog, &b.catalog).unwrap());
    let rb = speedup_stats(&match_functions(&a.catalog, &b.catalog).unwrap());
    assert_eq!(ra, rb);
}

proptest! {
    #[test]
    fn class_is_invariant_under_positive_scaling(
        a in 1i64..50, b in 0i64..20, c in 0i64..4, d in 0i64..2, k in 1i64..40, n in 6usize..=21,
    ) {
        let base: Vec<Option<BigInt>> = (0..n as i64).map(|i| Some(BigInt::from(a + b * i + c * i * i + d * i * i * i))).collect();
        let scaled: Vec<Option<BigInt>> = base.iter().map(|v| v.as_ref().map(|x| x * k)).collect();
        prop_assert_eq!(classify_complexity(&base).class(), classify_complexity(&scaled).class());
    }

    #[test]
    fn exponential_scaling(a in 1i64..9, k in 1i64..40, n in 8usize..=21) {
        let base: Vec<Option<BigInt>> = (0..n as u32).map(|i| Some(BigInt::from(a) * BigInt::from(2).pow(i) + 1)).collect();
        let scaled: Vec<Option<BigInt>> = base.iter().map(|v| v.as_ref().map(|x| x * k)).collect();
        prop_assert_eq!(classify_complexity(&base).class(), classify_complexity(&scaled).class());
    }
}
