//! Per-machine cleansing: complete the three sequences of a machine, then
//! optionally rerun the filled inputs at a deeper bound and keep whatever the
//! deep run establishes.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::analyzer::{AnalyzerError, Catalog, CatalogBuilder, HaltingHistogram};
use crate::cleanser::{complete, verify, CompletionResult, SequenceKind, SequenceProfile, Verdict};
use crate::harness::{for_each_machine, BatchSpec, HarnessError, MachineRuns, MachineSet, StoreReader};
use crate::rulecodec::{decode_u64, SpaceParams};
use crate::simulator::{run_accelerated, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyPolicy {
    /// No cleansing; divergent entries stay divergent.
    Raw,
    /// Keep the extrapolated values as they are.
    PredictOnly,
    /// Rerun filled inputs at `bound`; a halting deep run overrides the
    /// prediction.
    Deep { bound: u64 },
}

/// One machine after cleansing. Sequences are indexed by input position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleansedMachine {
    pub rule_number: u64,
    pub outputs: Vec<Option<BigInt>>,
    pub runtimes: Vec<Option<BigInt>>,
    pub spaces: Vec<Option<BigInt>>,
    /// Positions where the raw run diverged.
    pub raw_divergent: Vec<usize>,
    pub fills: Vec<(SequenceKind, usize, String)>,
    pub verdicts: Vec<(SequenceKind, usize, Verdict)>,
}

impl CleansedMachine {
    pub fn sequence(&self, kind: SequenceKind) -> &[Option<BigInt>] {
        match kind {
            SequenceKind::Output => &self.outputs,
            SequenceKind::Runtime => &self.runtimes,
            SequenceKind::Space => &self.spaces,
        }
    }

    /// Cleansed machine that received no fills.
    pub fn unchanged(m: &MachineRuns) -> Self {
        let [outputs, runtimes, spaces] = SequenceKind::ALL.map(|k| m.profile(k).values);
        Self {
            rule_number: m.rule_number,
            raw_divergent: divergent_positions(m),
            outputs,
            runtimes,
            spaces,
            fills: Vec::new(),
            verdicts: Vec::new(),
        }
    }
}

fn divergent_positions(m: &MachineRuns) -> Vec<usize> {
    m.records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.halted())
        .map(|(i, _)| i)
        .collect()
}

/// Aggregate counters over many cleansed machines.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanseStats {
    pub machines: u64,
    pub machines_filled: u64,
    pub values_filled: u64,
    pub gave_up: u64,
    pub confirmed: u64,
    pub unconfirmable: u64,
    pub contradicted: u64,
    pub new_values: u64,
}

impl CleanseStats {
    pub fn add(&mut self, m: &CleansedMachine, gave_up: usize) {
        self.machines += 1;
        if !m.fills.is_empty() {
            self.machines_filled += 1;
        }
        self.values_filled += m.fills.len() as u64;
        self.gave_up += gave_up as u64;
        for (_, _, v) in &m.verdicts {
            match v {
                Verdict::Confirmed => self.confirmed += 1,
                Verdict::Unconfirmable => self.unconfirmable += 1,
                Verdict::Contradicted { .. } => self.contradicted += 1,
                Verdict::NewValue { .. } => self.new_values += 1,
            }
        }
    }
}

/// Cleanses one machine. Returns the machine and the number of sequences on
/// which the fitter gave up.
pub fn cleanse_machine(params: SpaceParams, inputs: &[u32], m: &MachineRuns, policy: VerifyPolicy) -> (CleansedMachine, usize) {
    if policy == VerifyPolicy::Raw || m.records.iter().all(|r| r.halted()) {
        return (CleansedMachine::unchanged(m), 0);
    }
    let raw: [SequenceProfile; 3] = SequenceKind::ALL.map(|k| m.profile(k));
    let done: Vec<CompletionResult> = raw.iter().map(complete).collect();
    let gave_up = done.iter().filter(|c| c.gave_up_at.is_some()).count();

    let mut fills = Vec::new();
    for (kind, c) in SequenceKind::ALL.iter().zip(&done) {
        for (pos, model) in &c.fills {
            fills.push((*kind, *pos, model.describe()));
        }
    }
    let mut seqs: Vec<Vec<Option<BigInt>>> = done.iter().map(|c| c.completed.values.clone()).collect();
    let mut verdicts = Vec::new();

    if let (VerifyPolicy::Deep { bound }, false) = (policy, fills.is_empty()) {
        let program = Program::new(&decode_u64(m.rule_number, params).expect("rule from a valid store"));
        let mut deep: Vec<Vec<Option<BigInt>>> = raw.iter().map(|p| p.values.clone()).collect();
        for (i, rec) in m.records.iter().enumerate() {
            if rec.halted() {
                continue;
            }
            if let Some(h) = run_accelerated(&program, inputs[i], bound).outcome {
                deep[0][i] = Some(BigInt::from(h.output.value()));
                deep[1][i] = Some(BigInt::from(h.runtime));
                deep[2][i] = Some(BigInt::from(h.space));
            }
        }
        for (k, kind) in SequenceKind::ALL.iter().enumerate() {
            let report = verify(&done[k], &SequenceProfile::raw(*kind, deep[k].clone()));
            for (pos, v) in report.verdicts {
                verdicts.push((*kind, pos, v));
            }
            for (pos, value) in deep[k].iter().enumerate() {
                if value.is_some() {
                    seqs[k][pos] = value.clone();
                }
            }
        }
    }

    let mut seqs = seqs.into_iter();
    let cleansed = CleansedMachine {
        rule_number: m.rule_number,
        outputs: seqs.next().expect("three sequences"),
        runtimes: seqs.next().expect("three sequences"),
        spaces: seqs.next().expect("three sequences"),
        raw_divergent: divergent_positions(m),
        fills,
        verdicts,
    };
    (cleansed, gave_up)
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Analyzer(#[from] AnalyzerError),
}

/// Everything derived from one pass over a space.
#[derive(Debug, Clone)]
pub struct SpaceAnalysis {
    pub params: SpaceParams,
    pub catalog: Catalog,
    pub raw_histogram: HaltingHistogram,
    pub cleansed_histogram: HaltingHistogram,
    pub stats: CleanseStats,
}

/// Streaming accumulator behind [`analyze_space`] and [`analyze_store`].
pub struct Analysis {
    params: SpaceParams,
    inputs: Vec<u32>,
    policy: VerifyPolicy,
    catalog: CatalogBuilder,
    raw: HaltingHistogram,
    cleansed: HaltingHistogram,
    stats: CleanseStats,
}

impl Analysis {
    pub fn new(params: SpaceParams, inputs: Vec<u32>, histogram_steps: u64, policy: VerifyPolicy, full_space: bool) -> Self {
        let expected = if full_space { params.space_size_u64() } else { None };
        Self {
            params,
            catalog: CatalogBuilder::new(inputs.clone(), expected),
            raw: HaltingHistogram::new(inputs.clone(), histogram_steps),
            cleansed: HaltingHistogram::new(inputs.clone(), histogram_steps),
            inputs,
            policy,
            stats: CleanseStats::default(),
        }
    }

    pub fn add(&mut self, m: &MachineRuns) -> Result<(), PipelineError> {
        self.raw.add_raw(m);
        let (c, gave_up) = cleanse_machine(self.params, &self.inputs, m, self.policy);
        self.stats.add(&c, gave_up);
        self.cleansed.add_cleansed(&c);
        self.catalog.add(&c)?;
        Ok(())
    }

    pub fn finish(self) -> Result<SpaceAnalysis, PipelineError> {
        Ok(SpaceAnalysis {
            params: self.params,
            catalog: self.catalog.finish()?,
            raw_histogram: self.raw,
            cleansed_histogram: self.cleansed,
            stats: self.stats,
        })
    }
}

/// Runs, cleanses and catalogs a batch in one streaming pass.
pub fn analyze_space(spec: &BatchSpec, policy: VerifyPolicy, jobs: usize) -> Result<SpaceAnalysis, PipelineError> {
    let full = matches!(spec.machines, MachineSet::All);
    let mut a = Analysis::new(spec.params, spec.inputs.clone(), spec.step_bound, policy, full);
    for_each_machine(spec, jobs, |m| a.add(&m))?;
    a.finish()
}

/// Cleanses and catalogs a stored batch.
pub fn analyze_store(reader: StoreReader, policy: VerifyPolicy) -> Result<SpaceAnalysis, PipelineError> {
    let meta = reader.meta().clone();
    let params = meta.params()?;
    let mut a = Analysis::new(params, meta.inputs.clone(), meta.step_bound, policy, !meta.is_sample());
    for m in reader {
        a.add(&m?)?;
    }
    a.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run_machine;

    fn p22() -> SpaceParams {
        SpaceParams::binary(2)
    }

    fn inputs() -> Vec<u32> {
        (0..=20).collect()
    }

    #[test]
    fn halting_machine_is_untouched() {
        let m = run_machine(p22(), 2240, &inputs(), 1000, true);
        let (c, gave_up) = cleanse_machine(p22(), &inputs(), &m, VerifyPolicy::Deep { bound: 200_000 });
        assert_eq!(gave_up, 0);
        assert!(c.fills.is_empty());
        assert_eq!(c, CleansedMachine::unchanged(&m));
    }

    #[test]
    fn rule_378_filled_and_confirmed() {
        let m = run_machine(p22(), 378, &inputs(), 1000, true);
        let (predicted, _) = cleanse_machine(p22(), &inputs(), &m, VerifyPolicy::PredictOnly);
        assert_eq!(predicted.runtimes[20], Some(BigInt::from(8_388_605u64)));
        assert_eq!(predicted.spaces[20], Some(BigInt::from(21)));
        assert_eq!(predicted.outputs[20], Some(BigInt::from(2_097_151u64)));
        assert!(predicted.verdicts.is_empty());

        let (deep, _) = cleanse_machine(p22(), &inputs(), &m, VerifyPolicy::Deep { bound: 10_000_000 });
        assert_eq!(deep.runtimes, predicted.runtimes);
        assert!(deep
            .verdicts
            .iter()
            .all(|(_, _, v)| *v == Verdict::Confirmed));
        assert_eq!(deep.verdicts.len(), predicted.fills.len());
    }

    #[test]
    fn divergent_machine_stays_divergent() {
        // Rule 0 writes 0, moves left and stays in state 1 forever.
        let m = run_machine(p22(), 0, &inputs(), 1000, true);
        let (c, _) = cleanse_machine(p22(), &inputs(), &m, VerifyPolicy::Deep { bound: 200_000 });
        assert!(c.runtimes.iter().all(Option::is_none));
        assert_eq!(c.raw_divergent.len(), 21);
    }
}
