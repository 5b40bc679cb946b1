//! Cross-space comparison: matching functions between two catalogs, class
//! distributions, speed-up and slow-down factors, and correlation of class
//! distributions.
//!
//! "Faster" is decided on the worst-case runtime of an algorithm over the
//! convergent inputs. Factors are ratios of mean runtimes against the fastest
//! baseline algorithm of the same function.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::{classify_complexity, AlgorithmProfile, Catalog, Classification, ComplexityClass, Sequence};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("function {outputs} of the smaller space is missing from the larger one")]
    Containment { outputs: String },
}

/// Runtime summary of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedAlgorithm {
    pub first_rule: u64,
    pub machines: usize,
    pub class: Classification,
    /// Mean runtime over convergent inputs.
    pub mean_runtime: Option<f64>,
    /// Largest runtime over convergent inputs.
    pub worst_runtime: Option<f64>,
}

impl MatchedAlgorithm {
    pub fn summarize(a: &AlgorithmProfile) -> Self {
        let times: Vec<f64> = a.runtimes.iter().flatten().map(big_to_f64).collect();
        let mean_runtime = (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64);
        let worst_runtime = times.iter().copied().reduce(f64::max);
        Self {
            first_rule: a.members.first().copied().unwrap_or_default(),
            machines: a.members.len(),
            class: classify_complexity(&a.runtimes),
            mean_runtime,
            worst_runtime,
        }
    }

    fn timed(&self) -> Option<(f64, f64)> {
        Some((self.mean_runtime?, self.worst_runtime?))
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// One function present in both spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionMatch {
    pub outputs: Sequence,
    pub baseline: Vec<MatchedAlgorithm>,
    pub richer: Vec<MatchedAlgorithm>,
}

impl FunctionMatch {
    fn min_class(algs: &[MatchedAlgorithm]) -> Option<ComplexityClass> {
        algs.iter().filter_map(|a| a.class.class()).min()
    }

    pub fn baseline_min_class(&self) -> Option<ComplexityClass> {
        Self::min_class(&self.baseline)
    }

    pub fn richer_min_class(&self) -> Option<ComplexityClass> {
        Self::min_class(&self.richer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSet {
    pub matches: Vec<FunctionMatch>,
    /// The richer catalog came from a random sample, so every derived number
    /// only describes that sample.
    pub sample_conditioned: bool,
}

fn summarize_all(catalog: &Catalog, f: &crate::analyzer::FunctionProfile) -> Vec<MatchedAlgorithm> {
    catalog.function_algorithms(f).map(MatchedAlgorithm::summarize).collect()
}

/// Joins every function of `baseline` with the same output tuple in
/// `richer`. A baseline function absent from `richer` is an error: a space
/// with more states contains every machine of the smaller one up to
/// relabeling.
pub fn match_functions(baseline: &Catalog, richer: &Catalog) -> Result<MatchSet, CompareError> {
    let mut matches = Vec::with_capacity(baseline.functions.len());
    for f in &baseline.functions {
        let g = richer
            .function_by_outputs(&f.outputs)
            .ok_or_else(|| CompareError::Containment { outputs: format_tuple(&f.outputs) })?;
        matches.push(FunctionMatch {
            outputs: f.outputs.clone(),
            baseline: summarize_all(baseline, f),
            richer: summarize_all(richer, g),
        });
    }
    Ok(MatchSet { matches, sample_conditioned: false })
}

/// Functions common to a catalog and a sampled catalog.
pub fn match_sampled(baseline: &Catalog, sample: &Catalog) -> MatchSet {
    let matches = baseline
        .functions
        .iter()
        .filter_map(|f| {
            let g = sample.function_by_outputs(&f.outputs)?;
            Some(FunctionMatch {
                outputs: f.outputs.clone(),
                baseline: summarize_all(baseline, f),
                richer: summarize_all(sample, g),
            })
        })
        .collect();
    MatchSet { matches, sample_conditioned: true }
}

pub fn format_tuple(seq: &[Option<BigInt>]) -> String {
    let parts: Vec<String> = seq
        .iter()
        .map(|v| v.as_ref().map_or_else(|| "-1".to_string(), BigInt::to_string))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// Algorithm counts per complexity class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub constant: u64,
    /// Counts for `ComplexityClass::NON_CONSTANT`, in order.
    pub non_constant: [u64; 5],
    pub unclassified: u64,
}

impl ClassDistribution {
    pub fn add(&mut self, c: Classification) {
        match c.class() {
            None => self.unclassified += 1,
            Some(ComplexityClass::O1) => self.constant += 1,
            Some(c) => {
                let i = ComplexityClass::NON_CONSTANT.iter().position(|x| *x == c).expect("non-constant class");
                self.non_constant[i] += 1;
            }
        }
    }

    pub fn non_constant_total(&self) -> u64 {
        self.non_constant.iter().sum()
    }

    /// Fractions over the non-constant classes; all zero when there are none.
    pub fn fractions(&self) -> [f64; 5] {
        let total = self.non_constant_total();
        if total == 0 {
            return [0.0; 5];
        }
        self.non_constant.map(|c| c as f64 / total as f64)
    }
}

/// Class counts over every algorithm of a catalog.
pub fn class_distribution(catalog: &Catalog) -> ClassDistribution {
    let mut d = ClassDistribution::default();
    for a in &catalog.algorithms {
        d.add(classify_complexity(&a.runtimes));
    }
    d
}

/// Pearson coefficient; `None` when either vector has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len(), "vectors over the same classes");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

/// Pairwise Pearson coefficients `(i, j, r)` for `i < j`.
pub fn class_correlation(distributions: &[ClassDistribution]) -> Vec<(usize, usize, Option<f64>)> {
    let fr: Vec<[f64; 5]> = distributions.iter().map(ClassDistribution::fractions).collect();
    let mut out = Vec::new();
    for i in 0..fr.len() {
        for j in i + 1..fr.len() {
            out.push((i, j, pearson(&fr[i], &fr[j])));
        }
    }
    out
}

/// Matched functions whose fastest class in the richer space is strictly
/// below the fastest class in the baseline.
pub fn essential_speedups(set: &MatchSet) -> Vec<&FunctionMatch> {
    set.matches
        .iter()
        .filter(|m| match (m.baseline_min_class(), m.richer_min_class()) {
            (Some(b), Some(r)) => r < b,
            _ => false,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpeedup {
    pub outputs: Sequence,
    pub baseline_best_mean: f64,
    pub baseline_best_worst: f64,
    pub richer_best_mean: f64,
    pub faster: usize,
    pub slower: usize,
    pub ties: usize,
    /// Mean of baseline/richer mean-runtime ratios over the faster algorithms.
    pub speedup: Option<f64>,
    /// Mean of richer/baseline mean-runtime ratios over the slower algorithms.
    pub slowdown: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub sample_conditioned: bool,
    pub functions: Vec<FunctionSpeedup>,
    /// Richer-space algorithms with at least one convergent runtime.
    pub richer_algorithms: usize,
    pub faster_algorithms: usize,
    pub slower_algorithms: usize,
    pub functions_with_faster: usize,
    pub average_speedup: Option<f64>,
    pub max_speedup: Option<f64>,
    pub average_slowdown: Option<f64>,
    pub max_slowdown: Option<f64>,
}

impl SpeedupReport {
    pub fn fraction_with_faster(&self) -> f64 {
        if self.functions.is_empty() {
            0.0
        } else {
            self.functions_with_faster as f64 / self.functions.len() as f64
        }
    }

    /// log10 of the probability of at most `faster` successes among the
    /// faster and slower algorithms under a fair coin.
    pub fn sign_test_log10(&self) -> f64 {
        binomial_lower_tail_log10(self.faster_algorithms as u64, (self.faster_algorithms + self.slower_algorithms) as u64)
    }
}

/// log10 P(X <= k) for X ~ Binomial(n, 1/2).
pub fn binomial_lower_tail_log10(k: u64, n: u64) -> f64 {
    let mut ln_c = 0.0f64; // ln C(n, 0)
    let mut terms = Vec::with_capacity(k as usize + 1);
    for i in 0..=k.min(n) {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        terms.push(ln_c);
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    (top + sum.ln() - n as f64 * std::f64::consts::LN_2) / std::f64::consts::LN_10
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Speed-ups and slow-downs of the richer space against the baseline.
pub fn speedup_stats(set: &MatchSet) -> SpeedupReport {
    let mut functions = Vec::new();
    let mut all_slow = Vec::new();
    let mut all_fast = Vec::new();
    let mut richer_algorithms = 0;
    for m in &set.matches {
        let base: Vec<(f64, f64)> = m.baseline.iter().filter_map(MatchedAlgorithm::timed).collect();
        let rich: Vec<(f64, f64)> = m.richer.iter().filter_map(MatchedAlgorithm::timed).collect();
        richer_algorithms += rich.len();
        if base.is_empty() || rich.is_empty() {
            continue;
        }
        let best_mean = base.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
        let best_worst = base.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        let (mut ups, mut downs, mut ties) = (Vec::new(), Vec::new(), 0);
        for &(mean_t, worst_t) in &rich {
            if worst_t < best_worst {
                ups.push(best_mean / mean_t);
            } else if worst_t > best_worst {
                downs.push(mean_t / best_mean);
            } else {
                ties += 1;
            }
        }
        all_fast.extend(ups.iter().copied());
        all_slow.extend(downs.iter().copied());
        functions.push(FunctionSpeedup {
            outputs: m.outputs.clone(),
            baseline_best_mean: best_mean,
            baseline_best_worst: best_worst,
            richer_best_mean: rich.iter().map(|t| t.0).fold(f64::INFINITY, f64::min),
            faster: ups.len(),
            slower: downs.len(),
            ties,
            speedup: mean(&ups),
            slowdown: mean(&downs),
        });
    }
    let per_fn_up: Vec<f64> = functions.iter().filter_map(|f| f.speedup).collect();
    let per_fn_down: Vec<f64> = functions.iter().filter_map(|f| f.slowdown).collect();
    SpeedupReport {
        sample_conditioned: set.sample_conditioned,
        richer_algorithms,
        faster_algorithms: all_fast.len(),
        slower_algorithms: all_slow.len(),
        functions_with_faster: functions.iter().filter(|f| f.faster > 0).count(),
        average_speedup: mean(&per_fn_up),
        max_speedup: all_fast.iter().copied().reduce(f64::max),
        average_slowdown: mean(&per_fn_down),
        max_slowdown: all_slow.iter().copied().reduce(f64::max),
        functions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[i64]) -> Sequence {
        v.iter().map(|&x| (x >= 0).then(|| BigInt::from(x))).collect()
    }

    fn alg(outputs: &[i64], runtimes: &[i64], rule: u64) -> AlgorithmProfile {
        AlgorithmProfile {
            outputs: seq(outputs),
            runtimes: seq(runtimes),
            spaces: seq(&vec![0; outputs.len()]),
            members: vec![rule],
        }
    }

    fn catalog(algs: Vec<AlgorithmProfile>) -> Catalog {
        let mut functions: Vec<crate::analyzer::FunctionProfile> = Vec::new();
        for (i, a) in algs.iter().enumerate() {
            match functions.iter_mut().find(|f| f.outputs == a.outputs) {
                Some(f) => {
                    f.members.extend(&a.members);
                    f.algorithms.push(i);
                }
                None => functions.push(crate::analyzer::FunctionProfile {
                    outputs: a.outputs.clone(),
                    members: a.members.clone(),
                    algorithms: vec![i],
                }),
            }
        }
        functions.sort_by(|a, b| a.outputs.cmp(&b.outputs));
        Catalog {
            inputs: (0..algs[0].outputs.len() as u32).collect(),
            functions,
            algorithms: algs,
            definable_sets: Vec::new(),
        }
    }

    const OUT: [i64; 5] = [1, 2, 3, 4, 5];

    #[test]
    fn self_match_is_identity() {
        let c = catalog(vec![alg(&OUT, &[3, 5, 7, 9, 11], 1), alg(&[0, 0, 0, 0, 0], &[1, 1, 1, 1, 1], 2)]);
        let set = match_functions(&c, &c).unwrap();
        assert_eq!(set.matches.len(), 2);
        for m in &set.matches {
            assert_eq!(m.baseline, m.richer);
        }
        let r = speedup_stats(&set);
        assert_eq!(r.faster_algorithms, 0);
        assert_eq!(r.slower_algorithms, 0);
        assert_eq!(r.average_speedup, None);
        assert_eq!(r.average_slowdown, None);
    }

    #[test]
    fn missing_function_is_a_containment_error() {
        let small = catalog(vec![alg(&OUT, &[3, 5, 7, 9, 11], 1)]);
        let big = catalog(vec![alg(&[0, 0, 0, 0, 0], &[1, 1, 1, 1, 1], 2)]);
        assert!(matches!(match_functions(&small, &big), Err(CompareError::Containment { .. })));
        assert!(match_sampled(&small, &big).matches.is_empty());
        assert!(match_sampled(&small, &big).sample_conditioned);
    }

    #[test]
    fn faster_and_slower_factors() {
        let small = catalog(vec![alg(&OUT, &[4, 6, 8, 10, 12], 1)]);
        let big = catalog(vec![
            alg(&OUT, &[2, 3, 4, 5, 6], 10),
            alg(&OUT, &[4, 6, 8, 10, 12], 11),
            alg(&OUT, &[8, 12, 16, 20, 24], 12),
            alg(&OUT, &[16, 24, 32, 40, 48], 13),
        ]);
        let r = speedup_stats(&match_functions(&small, &big).unwrap());
        assert_eq!(r.richer_algorithms, 4);
        assert_eq!((r.faster_algorithms, r.slower_algorithms), (1, 2));
        assert_eq!(r.functions[0].ties, 1);
        assert_eq!(r.functions_with_faster, 1);
        assert_eq!(r.average_speedup, Some(2.0));
        assert_eq!(r.average_slowdown, Some(3.0));
        assert_eq!(r.max_slowdown, Some(4.0));
        assert_eq!(r.fraction_with_faster(), 1.0);
    }

    #[test]
    fn only_linear_algorithms() {
        let c = catalog(vec![alg(&OUT, &[3, 5, 7, 9, 11], 1), alg(&[1, 1, 1, 1, 1], &[2, 4, 6, 8, 10], 2)]);
        let d = class_distribution(&c);
        assert_eq!(d.fractions(), [1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.constant, 0);
    }

    #[test]
    fn pearson_cases() {
        let a = [0.94, 0.03, 0.0, 0.0, 0.03];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        // Direct computation: means 0.2, covariance sum -0.2, variances 0.8.
        let r = pearson(&[1.0, 0.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((r - (-0.25)).abs() < 1e-12);
        assert_eq!(pearson(&[0.2; 5], &a), None);
    }

    #[test]
    fn correlation_pairs() {
        let mut d1 = ClassDistribution::default();
        d1.non_constant = [90, 5, 2, 1, 2];
        let mut d2 = ClassDistribution::default();
        d2.non_constant = [900, 50, 20, 10, 20];
        let r = class_correlation(&[d1.clone(), d2, d1]);
        assert_eq!(r.len(), 3);
        for (_, _, c) in r {
            assert!((c.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binomial_tail() {
        // P(X <= 0) for n = 10 is 2^-10.
        assert!((binomial_lower_tail_log10(0, 10) - (-10.0 * 2f64.log10())).abs() < 1e-12);
        // P(X <= 1) for n = 3 is 4/8.
        assert!((binomial_lower_tail_log10(1, 3) - 0.5f64.log10()).abs() < 1e-12);
        assert!((binomial_lower_tail_log10(3, 3)).abs() < 1e-12);
    }

    #[test]
    fn essential_speedup_detected() {
        let small = catalog(vec![alg(&OUT, &[3, 5, 7, 9, 11], 1)]);
        let big = catalog(vec![alg(&OUT, &[1, 1, 1, 1, 1], 2), alg(&OUT, &[3, 5, 7, 9, 11], 3)]);
        let set = match_functions(&small, &big).unwrap();
        assert_eq!(essential_speedups(&set).len(), 1);
        assert!(essential_speedups(&match_functions(&small, &small).unwrap()).is_empty());
    }
}
