use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tmspace_core::cleanser::{berlekamp_massey, complete, SequenceKind, SequenceProfile};

/// Regular integer sequences of the kinds machines produce, plus noise.
fn regular_sequence() -> impl Strategy<Value = Vec<i64>> {
    let len = 8usize..=21;
    prop_oneof![
        (len.clone(), -5i64..20, -3i64..6, 0i64..3, 0i64..2).prop_map(|(n, a, b, c, d)| {
            (0..n as i64).map(|i| a + b * i + c * i * i + d * i * i * i).collect()
        }),
        (len.clone(), 1i64..4, -3i64..4, 2i64..4).prop_map(|(n, a, b, base)| {
            (0..n as u32).map(|i| a * base.pow(i.min(30)) + b).collect()
        }),
        (len.clone(), 1i64..6, 1i64..6, 0i64..5).prop_map(|(n, a, b, c)| {
            (0..n as i64).map(|i| if i % 2 == 0 { a * i + c } else { b * i + c }).collect()
        }),
        prop::collection::vec(0i64..1000, 8..=21),
    ]
}

/// A sequence with a censoring threshold and scattered divergent entries.
fn censored_sequence() -> impl Strategy<Value = Vec<Option<i64>>> {
    (regular_sequence(), 0u64..4, any::<u64>()).prop_map(|(values, cut, mask)| {
        let threshold = values.iter().copied().max().unwrap_or(0) - cut as i64 * 7;
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let dropped = mask >> (i % 64) & 1 == 1 && mask % 3 == 0;
                (v <= threshold && !dropped).then_some(v)
            })
            .collect()
    })
}

fn profile(values: &[Option<i64>]) -> SequenceProfile {
    SequenceProfile::raw(SequenceKind::Runtime, values.iter().map(|v| v.map(BigInt::from)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn completion_invariants(values in censored_sequence()) {
        let p = profile(&values);
        let c = complete(&p);

        // Convergent entries are never changed.
        for (orig, done) in p.values.iter().zip(&c.completed.values) {
            if orig.is_some() {
                prop_assert_eq!(orig, done);
            }
        }

        // Completing again changes nothing.
        let again = complete(&c.completed);
        prop_assert!(again.fills.is_empty());
        prop_assert_eq!(&again.completed.values, &c.completed.values);

        // Each fill is reproduced by its model, and the model reproduces the
        // run it was fitted on.
        for (pos, model) in &c.fills {
            prop_assert!(p.values[*pos].is_none());
            prop_assert_eq!(model.eval(*pos), c.completed.values[*pos].clone());
            for k in 0..model.len {
                let idx = model.start + k * model.stride;
                prop_assert_eq!(model.eval(idx), c.completed.values[idx].clone());
            }
        }
    }
}

/// Minimal `L` such that some recurrence of order `L` generates `seq`,
/// found by solving the shifted Hankel systems directly.
fn minimal_order_by_elimination(seq: &[BigRational]) -> usize {
    let m = seq.len();
    (0..=m)
        .find(|&l| {
            // Rows: a(n) = c1 a(n-1) + … + cl a(n-l) for n in l..m.
            let mut rows: Vec<Vec<BigRational>> = (l..m)
                .map(|n| {
                    let mut r: Vec<BigRational> = (1..=l).map(|i| seq[n - i].clone()).collect();
                    r.push(seq[n].clone());
                    r
                })
                .collect();
            consistent(&mut rows, l)
        })
        .expect("order m always works")
}

fn consistent(rows: &mut [Vec<BigRational>], unknowns: usize) -> bool {
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &pivot;
                for c in col..=unknowns {
                    let v = &rows[rank][c] * &f;
                    rows[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rows[rank..].iter().all(|r| r[unknowns].is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn berlekamp_massey_finds_the_minimal_order(values in regular_sequence()) {
        let seq: Vec<BigRational> = values.iter().map(|&v| BigRational::from_integer(v.into())).collect();
        let c = berlekamp_massey(&seq);
        prop_assert!(c[0].is_one());
        let order = c.len() - 1;
        prop_assert_eq!(order, minimal_order_by_elimination(&seq));
        for n in order..seq.len() {
            let mut acc = seq[n].clone();
            for i in 1..=order {
                acc += &c[i] * &seq[n - i];
            }
            prop_assert!(acc.is_zero());
        }
    }
}
