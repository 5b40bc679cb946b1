//! Completion of bound-censored sequences.
//!
//! A sequence of 21 values has `None` wherever the machine did not halt
//! within the step bound. When a divergent position is preceded by a run of
//! at least [`MIN_SEGMENT`] convergent values, the run is fitted with an
//! exact sequence law and the law's value at the divergent position is
//! filled in. Positions are processed left to right, so filled values
//! lengthen the run available to the next position. Sequences where
//! divergence alternates with convergent values are also completed from
//! their every-other-index run.
//!
//! Candidate laws, tried in order, first match wins:
//! 1. a polynomial of degree `d <= min(4, m / 2)` (finite differences),
//! 2. a constant-coefficient linear recurrence of order
//!    `1 <= r <= (m - 1) / 2`, found by Berlekamp–Massey over the rationals.
//!
//! All arithmetic is exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Shortest convergent run that may seed a fit.
pub const MIN_SEGMENT: usize = 4;
/// Highest polynomial degree tried.
pub const MAX_POLY_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceKind {
    Output,
    Runtime,
    Space,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 3] = [SequenceKind::Output, SequenceKind::Runtime, SequenceKind::Space];

    /// Smallest value a convergent entry of this kind can take.
    fn floor(self) -> BigInt {
        match self {
            SequenceKind::Runtime => BigInt::one(),
            SequenceKind::Output | SequenceKind::Space => BigInt::zero(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Output => "output",
            SequenceKind::Runtime => "runtime",
            SequenceKind::Space => "space",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Raw,
    Cleansed,
}

/// A per-input sequence; `None` marks divergence (exported as −1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceProfile {
    pub kind: SequenceKind,
    pub provenance: Provenance,
    pub values: Vec<Option<BigInt>>,
}

impl SequenceProfile {
    pub fn raw(kind: SequenceKind, values: Vec<Option<BigInt>>) -> Self {
        Self {
            kind,
            provenance: Provenance::Raw,
            values,
        }
    }

    /// Builds a raw profile from −1-sentinel integers.
    pub fn from_sentinel(kind: SequenceKind, values: &[i64]) -> Self {
        Self::raw(
            kind,
            values
                .iter()
                .map(|&v| (v >= 0).then(|| BigInt::from(v)))
                .collect(),
        )
    }

    pub fn to_sentinel_strings(&self) -> Vec<String> {
        self.values
            .iter()
            .map(|v| v.as_ref().map_or_else(|| "-1".to_string(), |x| x.to_string()))
            .collect()
    }

    pub fn divergent_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// An exact law for a run of `len` values at sequence indices `start`,
/// `start + stride`, `start + 2·stride`, ….
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitModel {
    pub family: ModelFamily,
    pub start: usize,
    pub len: usize,
    #[serde(default = "unit_stride")]
    pub stride: usize,
}

fn unit_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelFamily {
    /// Leading forward differences `Δ^0 a, Δ^1 a, …, Δ^d a` at `start`.
    Polynomial { degree: usize, differences: Vec<BigInt> },
    /// `a(n) = c[0] a(n-1) + … + c[r-1] a(n-r)`, seeded with the first
    /// `r` values of the run.
    LinearRecurrence {
        coefficients: Vec<BigRational>,
        initial: Vec<BigInt>,
    },
}

impl FitModel {
    /// Value at sequence index `index`, if it is an integer. Indices before
    /// `start` or off the stride are not covered.
    pub fn eval(&self, index: usize) -> Option<BigInt> {
        let v = self.eval_exact(index)?;
        v.is_integer().then(|| v.to_integer())
    }

    /// Exact rational value at sequence index `index`.
    pub fn eval_exact(&self, index: usize) -> Option<BigRational> {
        if index < self.start || (index - self.start) % self.stride != 0 {
            return None;
        }
        let t = (index - self.start) / self.stride;
        match &self.family {
            ModelFamily::Polynomial { differences, .. } => {
                // Newton forward form: sum_j C(t, j) Δ^j a(start).
                let mut total = BigInt::zero();
                let mut binom = BigInt::one();
                for (j, d) in differences.iter().enumerate() {
                    if j > 0 {
                        if j > t {
                            break;
                        }
                        binom = binom * BigInt::from(t + 1 - j) / BigInt::from(j);
                    }
                    total += &binom * d;
                }
                Some(BigRational::from_integer(total))
            }
            ModelFamily::LinearRecurrence { coefficients, initial } => {
                let r = initial.len();
                if t < r {
                    return Some(BigRational::from_integer(initial[t].clone()));
                }
                let mut window: std::collections::VecDeque<BigRational> =
                    initial.iter().cloned().map(BigRational::from_integer).collect();
                for _ in r..=t {
                    let next = coefficients
                        .iter()
                        .zip(window.iter().rev())
                        .fold(BigRational::zero(), |acc, (c, a)| acc + c * a);
                    window.pop_front();
                    window.push_back(next);
                }
                window.pop_back()
            }
        }
    }

    /// Growth order implied by the law, as evaluated far beyond the run.
    pub fn degree(&self) -> Option<usize> {
        match &self.family {
            ModelFamily::Polynomial { degree, .. } => Some(*degree),
            ModelFamily::LinearRecurrence { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.family {
            ModelFamily::Polynomial { degree, differences } => {
                let diffs: Vec<String> = differences.iter().map(|d| d.to_string()).collect();
                format!("poly(d={degree}; diffs=[{}]; {})", diffs.join(" "), self.span())
            }
            ModelFamily::LinearRecurrence { coefficients, initial } => {
                let cs: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                let init: Vec<String> = initial.iter().map(|c| c.to_string()).collect();
                format!(
                    "linrec(r={}; coeffs=[{}]; init=[{}]; {})",
                    coefficients.len(),
                    cs.join(" "),
                    init.join(" "),
                    self.span()
                )
            }
        }
    }
}

impl FitModel {
    fn span(&self) -> String {
        let end = self.start + self.len * self.stride;
        if self.stride == 1 {
            format!("span={}..{end}", self.start)
        } else {
            format!("span={}..{end} step {}", self.start, self.stride)
        }
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Fits a run that starts at sequence index 0.
pub fn fit_sequence(segment: &[BigInt]) -> Option<FitModel> {
    fit_segment(segment, 0)
}

/// Minimal law, in candidate order, reproducing `segment` exactly.
pub fn fit_segment(segment: &[BigInt], start: usize) -> Option<FitModel> {
    let m = segment.len();
    if m < MIN_SEGMENT {
        return None;
    }
    if let Some(family) = fit_polynomial(segment, MAX_POLY_DEGREE.min(m / 2)) {
        return Some(FitModel {
            family,
            start,
            len: m,
            stride: 1,
        });
    }
    let max_order = (m - 1) / 2;
    fit_recurrence(segment, max_order).map(|family| FitModel {
        family,
        start,
        len: m,
        stride: 1,
    })
}

fn fit_polynomial(segment: &[BigInt], max_degree: usize) -> Option<ModelFamily> {
    let mut row: Vec<BigInt> = segment.to_vec();
    let mut leading = Vec::new();
    for degree in 0..=max_degree {
        leading.push(row[0].clone());
        if row.iter().all(|v| *v == row[0]) {
            return Some(ModelFamily::Polynomial {
                degree,
                differences: leading,
            });
        }
        if row.len() <= 2 {
            return None;
        }
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    None
}

fn fit_recurrence(segment: &[BigInt], max_order: usize) -> Option<ModelFamily> {
    if max_order == 0 {
        return None;
    }
    let seq: Vec<BigRational> = segment.iter().cloned().map(BigRational::from_integer).collect();
    let connection = berlekamp_massey(&seq);
    let order = connection.len() - 1;
    if order == 0 || order > max_order {
        return None;
    }
    // C(x) = 1 + C1 x + … + CL x^L  ⇒  a(n) = -C1 a(n-1) - … - CL a(n-L).
    let coefficients: Vec<BigRational> = connection[1..].iter().map(|c| -c).collect();
    Some(ModelFamily::LinearRecurrence {
        coefficients,
        initial: segment[..order].to_vec(),
    })
}

/// Shortest linear recurrence generating `seq`, as a connection polynomial
/// `[1, C1, …, CL]` (ascending powers).
pub fn berlekamp_massey(seq: &[BigRational]) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut length = 0usize;
    let mut shift = 1usize;
    let mut last_discrepancy = BigRational::one();
    for n in 0..seq.len() {
        let mut d = seq[n].clone();
        for i in 1..=length {
            if let Some(ci) = c.get(i) {
                d += ci * &seq[n - i];
            }
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let scale = &d / &last_discrepancy;
        let previous = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + shift] -= &scale * bi;
        }
        if 2 * length <= n {
            length = n + 1 - length;
            b = previous;
            last_discrepancy = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(length + 1, BigRational::zero());
    c
}

/// Outcome of completing one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionResult {
    pub completed: SequenceProfile,
    /// Filled positions with the law that produced each value.
    pub fills: Vec<(usize, FitModel)>,
    /// First divergent position that had a long enough run but no law.
    pub gave_up_at: Option<usize>,
}

impl CompletionResult {
    pub fn filled_positions(&self) -> Vec<usize> {
        self.fills.iter().map(|(p, _)| *p).collect()
    }

    pub fn models_used(&self) -> Vec<&FitModel> {
        self.fills.iter().map(|(_, m)| m).collect()
    }
}

/// Fills divergent entries left to right.
///
/// A divergent position is filled when the maximal convergent run right
/// before it has at least [`MIN_SEGMENT`] values and some law reproduces that
/// run exactly. A second pass treats alternating divergence: a position whose
/// left neighbour diverges, preceded by at least [`MIN_SEGMENT`] convergent
/// values at every other index with divergent values in between, is filled
/// from the law of that every-other-index run. Both passes repeat until
/// neither fills anything, so completing a completed profile is a no-op.
pub fn complete(profile: &SequenceProfile) -> CompletionResult {
    let mut values = profile.values.clone();
    let mut fills = Vec::new();
    let mut gave_up_at: Option<usize>;
    let floor = profile.kind.floor();
    let predict = |segment: &[BigInt], start: usize, stride: usize, at: usize| {
        let mut model = fit_segment(segment, start)?;
        model.stride = stride;
        let value = model.eval(at).filter(|v| *v >= floor)?;
        Some((value, model))
    };

    // A stride-2 fill can extend a plain run, so repeat until nothing changes.
    loop {
        let before = fills.len();
        gave_up_at = None;
        let mut run_start = 0usize;
        for p in 0..values.len() {
            if values[p].is_some() {
                continue;
            }
            let run_len = p - run_start;
            if run_len >= MIN_SEGMENT {
                let segment: Vec<BigInt> = values[run_start..p]
                    .iter()
                    .map(|v| v.clone().expect("run is convergent"))
                    .collect();
                if let Some((value, model)) = predict(&segment, run_start, 1, p) {
                    values[p] = Some(value);
                    fills.push((p, model));
                    continue;
                }
                gave_up_at.get_or_insert(p);
            }
            run_start = p + 1;
        }

        for p in 1..values.len() {
            if values[p].is_some() || values[p - 1].is_some() {
                continue;
            }
            let mut segment = Vec::new();
            let mut q = p;
            while q >= 2 && values[q - 1].is_none() {
                match &values[q - 2] {
                    Some(v) => segment.push(v.clone()),
                    None => break,
                }
                q -= 2;
            }
            if segment.len() < MIN_SEGMENT {
                continue;
            }
            segment.reverse();
            let start = p - 2 * segment.len();
            match predict(&segment, start, 2, p) {
                Some((value, model)) => {
                    values[p] = Some(value);
                    fills.push((p, model));
                }
                None => {
                    gave_up_at = Some(gave_up_at.map_or(p, |g: usize| g.min(p)));
                }
            }
        }
        if fills.len() == before {
            break;
        }
    }
    fills.sort_by_key(|(p, _)| *p);

    CompletionResult {
        completed: SequenceProfile {
            kind: profile.kind,
            provenance: Provenance::Cleansed,
            values,
        },
        fills,
        gave_up_at,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Deep run halted with the predicted value.
    Confirmed,
    /// Deep run still divergent: the bound is too low or the prediction is
    /// wrong.
    Unconfirmable,
    /// Deep run halted with a different value.
    Contradicted { deep: String },
    /// Deep run halted where the predictor left a gap.
    NewValue { deep: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub verdicts: Vec<(usize, Verdict)>,
}

impl VerificationReport {
    pub fn count(&self, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.verdicts.iter().filter(|(_, v)| pred(v)).count()
    }

    pub fn confirmed(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Confirmed))
    }

    pub fn unconfirmable(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Unconfirmable))
    }

    pub fn contradicted(&self) -> usize {
        self.count(|v| matches!(v, Verdict::Contradicted { .. }))
    }

    pub fn new_values(&self) -> usize {
        self.count(|v| matches!(v, Verdict::NewValue { .. }))
    }

    /// True when the deep run disagrees with the completion anywhere.
    pub fn has_disagreement(&self) -> bool {
        self.contradicted() + self.new_values() > 0
    }
}

/// Compares a completion with the same sequence recomputed at a larger
/// step bound.
pub fn verify(completion: &CompletionResult, deep: &SequenceProfile) -> VerificationReport {
    let mut verdicts = Vec::new();
    let filled: Vec<usize> = completion.filled_positions();
    for (p, value) in completion.completed.values.iter().enumerate() {
        let deep_value = deep.values.get(p).cloned().flatten();
        if filled.contains(&p) {
            let predicted = value.as_ref().expect("filled positions hold values");
            let verdict = match deep_value {
                None => Verdict::Unconfirmable,
                Some(d) if &d == predicted => Verdict::Confirmed,
                Some(d) => Verdict::Contradicted { deep: d.to_string() },
            };
            verdicts.push((p, verdict));
        } else if value.is_none() {
            if let Some(d) = deep_value {
                verdicts.push((p, Verdict::NewValue { deep: d.to_string() }));
            }
        }
    }
    VerificationReport { verdicts }
}

/// Dominant growth of a law far beyond its run: `Some(d)` for polynomial
/// growth `n^d`, `None` for exponential growth. Decided by exact evaluation
/// at `n` and `2n` for large `n`.
pub fn growth_exponent(model: &FitModel) -> Option<u32> {
    if let Some(d) = model.degree() {
        return Some(d as u32);
    }
    // |a(2N)| / |a(N)| tends to 2^d for n^d growth and to rho^N for
    // exponential growth with dominant root rho > 1. Indices count terms of
    // the law, so strided laws are measured along their own stride.
    const N: usize = 1024;
    let (a, b) = match &model.family {
        ModelFamily::LinearRecurrence { coefficients, initial } => match integer_terms(coefficients, initial, N) {
            Some(pair) => pair,
            None => {
                // Rational values p/q are compared through p*q.
                let at = |n: usize| {
                    model
                        .eval_exact(model.start + n * model.stride)
                        .map(|v| (v.numer() * v.denom()).abs())
                        .unwrap_or_default()
                };
                (at(N), at(2 * N))
            }
        },
        ModelFamily::Polynomial { .. } => unreachable!("polynomials carry their degree"),
    };
    if b.is_zero() || a.is_zero() {
        return Some(0);
    }
    let ratio = log2_ratio(&b, &a);
    if ratio > 16.0 {
        return None;
    }
    Some(ratio.round().max(0.0) as u32)
}

/// `|a(n)|` and `|a(2n)|` of an integer-valued recurrence, computed over the
/// integers with a common denominator. `None` if some term is not an integer.
fn integer_terms(coefficients: &[BigRational], initial: &[BigInt], n: usize) -> Option<(BigInt, BigInt)> {
    let denom = coefficients
        .iter()
        .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    let scaled: Vec<BigInt> = coefficients.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
    let mut window: std::collections::VecDeque<BigInt> = initial.iter().cloned().collect();
    let mut at_n = None;
    for t in 0..=2 * n {
        if t >= initial.len() {
            let sum = scaled
                .iter()
                .zip(window.iter().rev())
                .fold(BigInt::zero(), |acc, (c, a)| acc + c * a);
            let (q, r) = num_integer::Integer::div_rem(&sum, &denom);
            if !r.is_zero() {
                return None;
            }
            window.pop_front();
            window.push_back(q);
        }
        let current = if t < initial.len() { &initial[t] } else { window.back().expect("non-empty window") };
        if t == n {
            at_n = Some(current.abs());
        }
    }
    let last = if 2 * n < initial.len() { initial[2 * n].abs() } else { window.back()?.abs() };
    Some((at_n?, last))
}

fn log2_ratio(num: &BigInt, den: &BigInt) -> f64 {
    let lg = |x: &BigInt| {
        let bits = x.bits();
        let shift = bits.saturating_sub(60);
        let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
        top.log2() + shift as f64
    };
    lg(num) - lg(den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn profile(v: &[i64]) -> SequenceProfile {
        SequenceProfile::from_sentinel(SequenceKind::Runtime, v)
    }

    fn sentinel(p: &SequenceProfile) -> Vec<i64> {
        p.values
            .iter()
            .map(|v| v.as_ref().map_or(-1, |x| x.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn arithmetic_progression() {
        let m = fit_sequence(&ints(&[3, 6, 9, 12])).unwrap();
        assert_eq!(m.degree(), Some(1));
        assert_eq!(m.eval(4), Some(BigInt::from(15)));
    }

    #[test]
    fn doubling() {
        let m = fit_sequence(&ints(&[2, 4, 8, 16])).unwrap();
        match &m.family {
            ModelFamily::LinearRecurrence { coefficients, .. } => {
                assert_eq!(coefficients, &vec![BigRational::from_integer(2.into())]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(m.eval(4), Some(BigInt::from(32)));
    }

    #[test]
    fn constant() {
        let m = fit_sequence(&ints(&[5, 5, 5, 5])).unwrap();
        assert_eq!(m.degree(), Some(0));
        assert_eq!(m.eval(10), Some(BigInt::from(5)));
    }

    #[test]
    fn short_segments_never_fit() {
        assert!(fit_sequence(&ints(&[1, 2, 3])).is_none());
    }

    #[test]
    fn power_of_two_minus_three_needs_order_two() {
        // 2^(n+2) - 3: the runtimes of the exponential tape-identity machines.
        let seg = ints(&[5, 13, 29, 61, 125, 253]);
        let m = fit_sequence(&seg).unwrap();
        assert!(matches!(m.family, ModelFamily::LinearRecurrence { ref coefficients, .. } if coefficients.len() == 2));
        assert_eq!(m.eval(20), Some(BigInt::from(8_388_605)));
    }

    #[test]
    fn worked_example_with_break() {
        let c = complete(&profile(&[2, 4, 8, 16, -1, 64, -1, 257, -1, -1]));
        assert_eq!(sentinel(&c.completed), vec![2, 4, 8, 16, 32, 64, 128, 257, -1, -1]);
        assert_eq!(c.filled_positions(), vec![4, 6]);
        assert_eq!(c.gave_up_at, Some(8));
    }

    #[test]
    fn worked_example_linear() {
        let c = complete(&profile(&[3, 6, 9, 12, -1, 18, 21, -1, 27, -1, 33, -1]));
        assert_eq!(sentinel(&c.completed), vec![3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33, 36]);
        assert_eq!(c.gave_up_at, None);
    }

    #[test]
    fn fully_convergent_is_untouched() {
        let p = profile(&[1, 2, 3, 4, 5]);
        let c = complete(&p);
        assert_eq!(c.completed.values, p.values);
        assert!(c.fills.is_empty());
    }

    #[test]
    fn no_long_run_means_no_fill() {
        let p = profile(&[3, -1, 5, -1, 7, -1, 9, -1]);
        let c = complete(&p);
        assert_eq!(c.completed.values, p.values);
        assert_eq!(c.gave_up_at, None);
    }

    #[test]
    fn alternating_divergence_continues_on_its_stride() {
        let c = complete(&profile(&[3, -1, 5, -1, 7, -1, 9, -1, -1, -1, -1]));
        assert_eq!(sentinel(&c.completed), vec![3, -1, 5, -1, 7, -1, 9, -1, 11, -1, 13]);
        assert_eq!(c.filled_positions(), vec![8, 10]);
        let (p, model) = &c.fills[0];
        assert_eq!((model.start, model.stride), (0, 2));
        assert_eq!(model.eval(*p), Some(BigInt::from(11)));
        assert_eq!(model.eval(7), None);
        assert_eq!(complete(&c.completed).fills, vec![]);
    }

    #[test]
    fn stride_two_fill_feeds_a_plain_run() {
        // Filling 8 from the even squares joins 64, 81, 100, 121 into a run
        // that then predicts 144 and 169.
        let c = complete(&profile(&[0, -1, 4, -1, 16, -1, 36, -1, -1, 81, 100, 121, -1, -1, 196]));
        assert_eq!(sentinel(&c.completed), vec![0, -1, 4, -1, 16, -1, 36, -1, 64, 81, 100, 121, 144, 169, 196]);
        assert_eq!(c.filled_positions(), vec![8, 12, 13]);
        assert_eq!(complete(&c.completed).fills, vec![]);
    }

    #[test]
    fn order_four_from_nine_terms() {
        let seg = ints(&[5, 11, 25, 41, 85, 131, 265, 401, 805]);
        let m = fit_sequence(&seg).unwrap();
        assert_eq!(m.eval(9), Some(BigInt::from(1211)));
    }

    #[test]
    fn predictions_below_floor_are_rejected() {
        // Decreasing line would reach 0 runtime at index 4.
        let c = complete(&profile(&[4, 3, 2, 1, -1]));
        assert_eq!(sentinel(&c.completed), vec![4, 3, 2, 1, -1]);
        assert_eq!(c.gave_up_at, Some(4));
    }

    #[test]
    fn verify_outcomes() {
        let c = complete(&profile(&[2, 4, 8, 16, -1, -1, -1]));
        let deep = profile(&[2, 4, 8, 16, 32, 63, -1]);
        let r = verify(&c, &deep);
        assert_eq!(r.verdicts[0], (4, Verdict::Confirmed));
        assert_eq!(r.verdicts[1], (5, Verdict::Contradicted { deep: "63".into() }));
        assert_eq!(r.verdicts[2], (6, Verdict::Unconfirmable));

        let gap = complete(&profile(&[1, -1, 3]));
        let r = verify(&gap, &profile(&[1, 7, 3]));
        assert_eq!(r.verdicts, vec![(1, Verdict::NewValue { deep: "7".into() })]);
    }

    #[test]
    fn growth_of_laws() {
        let lin = fit_sequence(&ints(&[3, 5, 7, 9, 11, 13])).unwrap();
        assert_eq!(growth_exponent(&lin), Some(1));
        let zigzag = fit_sequence(&ints(&[5, 5, 9, 9, 13, 13, 17, 17])).unwrap();
        assert_eq!(growth_exponent(&zigzag), Some(1));
        let exp = fit_sequence(&ints(&[5, 13, 29, 61, 125, 253])).unwrap();
        assert_eq!(growth_exponent(&exp), None);
    }
}
