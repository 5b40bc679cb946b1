//! Per-space statistics over cleansed machines: functions and algorithms,
//! determinant prefixes, halting-time histograms, runtime census, definable
//! sets and complexity classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cleanser::{fit_sequence, growth_exponent, ModelFamily, MIN_SEGMENT};
use crate::harness::MachineRuns;
use crate::pipeline::CleansedMachine;

pub type Sequence = Vec<Option<BigInt>>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalyzerError {
    #[error("rule {rule} has {found} values per sequence, expected {expected}")]
    WrongLength { rule: u64, found: usize, expected: usize },
    #[error("rule {rule} arrived after rule {previous}")]
    OutOfOrder { rule: u64, previous: u64 },
    #[error("records missing for rule {first_missing} ({missing} machines absent of {expected})")]
    Missing {
        first_missing: u64,
        missing: u64,
        expected: u64,
    },
}

/// Machines sharing output, runtime and space sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmProfile {
    pub outputs: Sequence,
    pub runtimes: Sequence,
    pub spaces: Sequence,
    pub members: Vec<u64>,
}

/// Machines sharing an output sequence. `algorithms` indexes into the
/// catalog's algorithm list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionProfile {
    pub outputs: Sequence,
    pub members: Vec<u64>,
    pub algorithms: Vec<usize>,
}

impl FunctionProfile {
    pub fn is_total(&self) -> bool {
        self.outputs.iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinableSet {
    /// Inputs on which the witnesses halt.
    pub inputs: Vec<u32>,
    pub witnesses: Vec<u64>,
    /// The complement within the input range is also definable.
    pub complement_definable: bool,
}

/// Functions and algorithms of a space, sorted lexicographically with
/// divergence ordered before every value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub inputs: Vec<u32>,
    pub functions: Vec<FunctionProfile>,
    pub algorithms: Vec<AlgorithmProfile>,
    pub definable_sets: Vec<DefinableSet>,
}

type AlgorithmKey = (Sequence, Sequence, Sequence);

/// Incremental catalog construction over a stream of cleansed machines.
pub struct CatalogBuilder {
    inputs: Vec<u32>,
    expected_machines: Option<u64>,
    seen: u64,
    last_rule: Option<u64>,
    first_gap: Option<u64>,
    algorithms: HashMap<AlgorithmKey, Vec<u64>>,
    halting_sets: HashMap<Vec<bool>, Vec<u64>>,
}

impl CatalogBuilder {
    /// `expected_machines` is the space size when the stream should cover
    /// rules `0..n` exactly.
    pub fn new(inputs: Vec<u32>, expected_machines: Option<u64>) -> Self {
        Self {
            inputs,
            expected_machines,
            seen: 0,
            last_rule: None,
            first_gap: None,
            algorithms: HashMap::new(),
            halting_sets: HashMap::new(),
        }
    }

    pub fn add(&mut self, m: &CleansedMachine) -> Result<(), AnalyzerError> {
        let expected = self.inputs.len();
        for seq in [&m.outputs, &m.runtimes, &m.spaces] {
            if seq.len() != expected {
                return Err(AnalyzerError::WrongLength {
                    rule: m.rule_number,
                    found: seq.len(),
                    expected,
                });
            }
        }
        let next_expected = self.last_rule.map_or(0, |r| r + 1);
        if let Some(previous) = self.last_rule {
            if m.rule_number <= previous {
                return Err(AnalyzerError::OutOfOrder {
                    rule: m.rule_number,
                    previous,
                });
            }
        }
        if m.rule_number != next_expected && self.first_gap.is_none() {
            self.first_gap = Some(next_expected);
        }
        self.last_rule = Some(m.rule_number);
        self.seen += 1;

        let halts = halting_pattern(m);
        self.halting_sets.entry(halts).or_default().push(m.rule_number);
        self.algorithms
            .entry((m.outputs.clone(), m.runtimes.clone(), m.spaces.clone()))
            .or_default()
            .push(m.rule_number);
        Ok(())
    }

    pub fn finish(self) -> Result<Catalog, AnalyzerError> {
        if let Some(expected) = self.expected_machines {
            if self.seen != expected {
                let first_missing = self.first_gap.unwrap_or_else(|| self.last_rule.map_or(0, |r| r + 1));
                return Err(AnalyzerError::Missing {
                    first_missing,
                    missing: expected.saturating_sub(self.seen),
                    expected,
                });
            }
        }
        let mut algorithms: Vec<AlgorithmProfile> = self
            .algorithms
            .into_iter()
            .map(|((outputs, runtimes, spaces), members)| AlgorithmProfile {
                outputs,
                runtimes,
                spaces,
                members,
            })
            .collect();
        algorithms.sort_by(|a, b| {
            (&a.outputs, &a.runtimes, &a.spaces).cmp(&(&b.outputs, &b.runtimes, &b.spaces))
        });

        let mut functions: Vec<FunctionProfile> = Vec::new();
        for (i, a) in algorithms.iter().enumerate() {
            match functions.last_mut() {
                Some(f) if f.outputs == a.outputs => {
                    f.members.extend_from_slice(&a.members);
                    f.algorithms.push(i);
                }
                _ => functions.push(FunctionProfile {
                    outputs: a.outputs.clone(),
                    members: a.members.clone(),
                    algorithms: vec![i],
                }),
            }
        }
        for f in &mut functions {
            f.members.sort_unstable();
        }

        let mut sets: Vec<DefinableSet> = self
            .halting_sets
            .iter()
            .map(|(pattern, witnesses)| {
                let complement: Vec<bool> = pattern.iter().map(|b| !b).collect();
                DefinableSet {
                    inputs: pattern
                        .iter()
                        .zip(&self.inputs)
                        .filter(|(h, _)| **h)
                        .map(|(_, x)| *x)
                        .collect(),
                    witnesses: witnesses.clone(),
                    complement_definable: self.halting_sets.contains_key(&complement),
                }
            })
            .collect();
        sets.sort_by(|a, b| a.inputs.len().cmp(&b.inputs.len()).then_with(|| a.inputs.cmp(&b.inputs)));

        Ok(Catalog {
            inputs: self.inputs,
            functions,
            algorithms,
            definable_sets: sets,
        })
    }
}

/// Inputs on which the cleansed machine is taken to halt: any of its three
/// sequences has a value there.
pub fn halting_pattern(m: &CleansedMachine) -> Vec<bool> {
    (0..m.outputs.len())
        .map(|i| m.outputs[i].is_some() || m.runtimes[i].is_some() || m.spaces[i].is_some())
        .collect()
}

/// Groups cleansed machines into functions and algorithms.
pub fn group(
    machines: &[CleansedMachine],
    inputs: &[u32],
    expected_machines: Option<u64>,
) -> Result<Catalog, AnalyzerError> {
    let mut b = CatalogBuilder::new(inputs.to_vec(), expected_machines);
    for m in machines {
        b.add(m)?;
    }
    b.finish()
}

impl Catalog {
    pub fn function_algorithms<'a>(&'a self, f: &'a FunctionProfile) -> impl Iterator<Item = &'a AlgorithmProfile> + 'a {
        f.algorithms.iter().map(move |&i| &self.algorithms[i])
    }

    pub fn machine_count(&self) -> u64 {
        self.algorithms.iter().map(|a| a.members.len() as u64).sum()
    }

    /// The function whose output equals its unary input tape.
    pub fn tape_identity(&self) -> Option<&FunctionProfile> {
        let target: Sequence = self
            .inputs
            .iter()
            .map(|&n| Some((BigInt::one() << (n + 1)) - 1))
            .collect();
        self.functions.iter().find(|f| f.outputs == target)
    }

    pub fn function_by_outputs(&self, outputs: &[Option<BigInt>]) -> Option<&FunctionProfile> {
        self.functions
            .binary_search_by(|f| f.outputs.as_slice().cmp(outputs))
            .ok()
            .map(|i| &self.functions[i])
    }
}

/// Shortest input prefix separating every function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminantPrefix {
    pub length: usize,
    /// Distinct output combinations on the first `i + 1` inputs.
    pub combinations: Vec<usize>,
    /// Function counts per output on the first input, most frequent first.
    pub first_input_frequencies: Vec<(Option<BigInt>, usize)>,
}

pub fn determinant_prefix(functions: &[FunctionProfile]) -> DeterminantPrefix {
    let width = functions.first().map_or(0, |f| f.outputs.len());
    let distinct = |len: usize| {
        let mut prefixes: Vec<&[Option<BigInt>]> = functions.iter().map(|f| &f.outputs[..len]).collect();
        prefixes.sort_unstable();
        prefixes.dedup();
        prefixes.len()
    };
    let mut combinations = Vec::new();
    let mut length = width.max(1);
    for len in 1..=width {
        let d = distinct(len);
        combinations.push(d);
        if d == functions.len() {
            length = len;
            break;
        }
    }
    assert!(length <= 1 || distinct(length - 1) < functions.len(), "prefix not minimal");

    let mut freq: BTreeMap<Option<BigInt>, usize> = BTreeMap::new();
    for f in functions {
        if let Some(v) = f.outputs.first() {
            *freq.entry(v.clone()).or_default() += 1;
        }
    }
    let mut first_input_frequencies: Vec<(Option<BigInt>, usize)> = freq.into_iter().collect();
    first_input_frequencies.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    DeterminantPrefix {
        length,
        combinations,
        first_input_frequencies,
    }
}

/// Halting-time occurrence counts, overall and per input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltingHistogram {
    pub max_steps: u64,
    pub inputs: Vec<u32>,
    /// `overall[t]` counts pairs halting in exactly `t` steps (`t <= max_steps`).
    pub overall: Vec<u64>,
    pub per_input: Vec<Vec<u64>>,
    /// Pairs halting after more than `max_steps` steps.
    pub beyond: u64,
    pub divergent: u64,
    pub pairs: u64,
}

impl HaltingHistogram {
    pub fn new(inputs: Vec<u32>, max_steps: u64) -> Self {
        let bins = max_steps as usize + 1;
        Self {
            max_steps,
            per_input: vec![vec![0; bins]; inputs.len()],
            inputs,
            overall: vec![0; bins],
            beyond: 0,
            divergent: 0,
            pairs: 0,
        }
    }

    fn record(&mut self, input_index: usize, runtime: Option<u64>) {
        self.pairs += 1;
        match runtime {
            None => self.divergent += 1,
            Some(t) if t > self.max_steps => self.beyond += 1,
            Some(t) => {
                self.overall[t as usize] += 1;
                self.per_input[input_index][t as usize] += 1;
            }
        }
    }

    /// Adds raw runs.
    pub fn add_raw(&mut self, m: &MachineRuns) {
        for (i, r) in m.records.iter().enumerate() {
            self.record(i, r.outcome.as_ref().map(|h| h.runtime));
        }
    }

    /// Adds cleansed runtimes; values too large for `u64` count as beyond.
    pub fn add_cleansed(&mut self, m: &CleansedMachine) {
        for (i, t) in m.runtimes.iter().enumerate() {
            let t = t.as_ref().map(|v| v.to_u64().unwrap_or(u64::MAX));
            self.record(i, t);
        }
    }

    pub fn count(&self, runtime: u64) -> u64 {
        self.overall.get(runtime as usize).copied().unwrap_or(0)
    }

    /// Fraction of pairs halting within `steps` steps.
    pub fn fraction_within(&self, steps: u64) -> f64 {
        let upto = (steps.min(self.max_steps) as usize) + 1;
        let n: u64 = self.overall[..upto].iter().sum();
        n as f64 / self.pairs as f64
    }

    /// Fraction of pairs halting at all.
    pub fn halting_fraction(&self) -> f64 {
        (self.pairs - self.divergent) as f64 / self.pairs as f64
    }

    /// Cumulative halting fraction by step, index `t` covering `1..=t`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0u64;
        self.overall
            .iter()
            .map(|c| {
                acc += c;
                acc as f64 / self.pairs as f64
            })
            .collect()
    }

    pub fn nonzero_bins(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.overall
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(t, c)| (t as u64, *c))
    }
}

/// Runtime sequences with machine counts, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuntimeCensus {
    pub entries: Vec<(Sequence, u64)>,
}

pub fn runtime_sequence_census(catalog: &Catalog) -> RuntimeCensus {
    let mut counts: HashMap<&Sequence, u64> = HashMap::new();
    for a in &catalog.algorithms {
        *counts.entry(&a.runtimes).or_default() += a.members.len() as u64;
    }
    let mut entries: Vec<(Sequence, u64)> = counts.into_iter().map(|(s, c)| (s.clone(), c)).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    RuntimeCensus { entries }
}

impl RuntimeCensus {
    pub fn top(&self, k: usize) -> &[(Sequence, u64)] {
        &self.entries[..k.min(self.entries.len())]
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }
}

/// Distinct runtime sequences among algorithms of total functions.
pub fn distinct_total_runtimes(catalog: &Catalog) -> usize {
    let mut seqs: Vec<&Sequence> = catalog
        .algorithms
        .iter()
        .filter(|a| a.outputs.iter().all(Option::is_some))
        .map(|a| &a.runtimes)
        .collect();
    seqs.sort_unstable();
    seqs.dedup();
    seqs.len()
}

/// Distinct space sequences over all algorithms.
pub fn distinct_spaces(catalog: &Catalog) -> usize {
    let mut seqs: Vec<&Sequence> = catalog.algorithms.iter().map(|a| &a.spaces).collect();
    seqs.sort_unstable();
    seqs.dedup();
    seqs.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinableSetsReport {
    pub sets: Vec<DefinableSet>,
    pub complement_closed: usize,
    pub not_closed: usize,
}

impl DefinableSetsReport {
    pub fn closed_under_complement(&self) -> bool {
        self.not_closed == 0
    }
}

pub fn definable_sets(catalog: &Catalog) -> DefinableSetsReport {
    let closed = catalog.definable_sets.iter().filter(|s| s.complement_definable).count();
    DefinableSetsReport {
        sets: catalog.definable_sets.clone(),
        complement_closed: closed,
        not_closed: catalog.definable_sets.len() - closed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComplexityClass {
    O1,
    On,
    On2,
    On3,
    On4,
    OExp,
}

impl ComplexityClass {
    pub const ALL: [ComplexityClass; 6] = [Self::O1, Self::On, Self::On2, Self::On3, Self::On4, Self::OExp];
    pub const NON_CONSTANT: [ComplexityClass; 5] = [Self::On, Self::On2, Self::On3, Self::On4, Self::OExp];

    /// Class of polynomial growth `n^d`; anything beyond `n^4` joins the
    /// exponential bucket.
    pub fn from_degree(d: u32) -> Self {
        match d {
            0 => Self::O1,
            1 => Self::On,
            2 => Self::On2,
            3 => Self::On3,
            4 => Self::On4,
            _ => Self::OExp,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::O1 => "O(1)",
            Self::On => "O(n)",
            Self::On2 => "O(n^2)",
            Self::On3 => "O(n^3)",
            Self::On4 => "O(n^4)",
            Self::OExp => "O(Exp)",
        }
    }
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassBasis {
    Polynomial,
    Recurrence,
    /// No exact law; least-squares slope of log t against log (n + 1).
    LogLogSlope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Classified { class: ComplexityClass, basis: ClassBasis },
    /// Fewer than four convergent runtimes.
    Unclassified,
}

impl Classification {
    pub fn class(&self) -> Option<ComplexityClass> {
        match self {
            Classification::Classified { class, .. } => Some(*class),
            Classification::Unclassified => None,
        }
    }
}

/// Complexity class of a cleansed runtime sequence.
///
/// Fully convergent sequences, and sequences whose convergent entries sit at
/// evenly spaced inputs, are classified by their exact law. Anything else
/// falls back to the log-log slope.
pub fn classify_complexity(runtimes: &[Option<BigInt>]) -> Classification {
    let points: Vec<(usize, &BigInt)> = runtimes
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.as_ref().map(|v| (i, v)))
        .collect();
    if points.len() < MIN_SEGMENT {
        return Classification::Unclassified;
    }
    let stride = points[1].0 - points[0].0;
    let even = points.windows(2).all(|w| w[1].0 - w[0].0 == stride);
    if even {
        let values: Vec<BigInt> = points.iter().map(|(_, v)| (*v).clone()).collect();
        if let Some(model) = fit_sequence(&values) {
            let (class, basis) = match &model.family {
                ModelFamily::Polynomial { degree, .. } => (ComplexityClass::from_degree(*degree as u32), ClassBasis::Polynomial),
                ModelFamily::LinearRecurrence { .. } => (
                    growth_exponent(&model).map_or(ComplexityClass::OExp, ComplexityClass::from_degree),
                    ClassBasis::Recurrence,
                ),
            };
            return Classification::Classified { class, basis };
        }
    }
    Classification::Classified {
        class: slope_class(&points),
        basis: ClassBasis::LogLogSlope,
    }
}

fn slope_class(points: &[(usize, &BigInt)]) -> ComplexityClass {
    let xs: Vec<f64> = points.iter().map(|(i, _)| ((*i + 1) as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| big_ln(v)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    if slope > 4.5 {
        return ComplexityClass::OExp;
    }
    // Round half down: ties go to the smaller class.
    let d = (slope - 0.5).ceil().max(0.0) as u32;
    ComplexityClass::from_degree(d)
}

fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(60);
    let top = (v >> shift).to_f64().unwrap_or(1.0).max(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Statistics at one input over the algorithms of a function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputStats {
    pub input: u32,
    pub convergent_algorithms: usize,
    pub mean_runtime: Option<f64>,
    pub mean_space: Option<f64>,
    pub harmonic_runtime: Option<f64>,
    /// Harmonic mean of `space + 2`.
    pub harmonic_space: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionOverview {
    pub outputs: Sequence,
    pub machines: usize,
    pub algorithms: usize,
    pub alternating_divergence: bool,
    pub per_input: Vec<InputStats>,
}

pub fn function_overview(catalog: &Catalog, f: &FunctionProfile) -> FunctionOverview {
    let algs: Vec<&AlgorithmProfile> = catalog.function_algorithms(f).collect();
    let per_input = catalog
        .inputs
        .iter()
        .enumerate()
        .map(|(i, &input)| {
            let rts: Vec<f64> = algs.iter().filter_map(|a| a.runtimes[i].as_ref()).map(big_to_f64).collect();
            let sps: Vec<f64> = algs.iter().filter_map(|a| a.spaces[i].as_ref()).map(big_to_f64).collect();
            let shifted: Vec<f64> = sps.iter().map(|s| s + 2.0).collect();
            InputStats {
                input,
                convergent_algorithms: rts.len(),
                mean_runtime: arithmetic_mean(&rts),
                mean_space: arithmetic_mean(&sps),
                harmonic_runtime: harmonic_mean(&rts),
                harmonic_space: harmonic_mean(&shifted),
            }
        })
        .collect();
    FunctionOverview {
        outputs: f.outputs.clone(),
        machines: f.members.len(),
        algorithms: algs.len(),
        alternating_divergence: alternating_divergence(&f.outputs),
        per_input,
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

pub fn arithmetic_mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// `n / Σ 1/xᵢ`; `None` for an empty slice or a zero entry.
pub fn harmonic_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|v| *v == 0.0) {
        return None;
    }
    Some(values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>())
}

/// Four or more consecutive entries alternate between divergent and
/// convergent.
pub fn alternating_divergence(seq: &[Option<BigInt>]) -> bool {
    let mut run = 1;
    for w in seq.windows(2) {
        if w[0].is_some() != w[1].is_some() {
            run += 1;
            if run >= 4 {
                return true;
            }
        } else {
            run = 1;
        }
    }
    false
}

/// Maximum over inputs of the runtime, or `None` when the algorithm never
/// halts.
pub fn max_runtime(a: &AlgorithmProfile) -> Option<&BigInt> {
    a.runtimes.iter().flatten().max()
}
