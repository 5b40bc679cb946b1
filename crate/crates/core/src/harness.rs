//! Batch execution over whole spaces, explicit machine lists and random
//! samples, plus the on-disk run store.
//!
//! Work is split into chunks of consecutive machines. Each chunk is simulated
//! in parallel and handed to a single consumer in ascending rule order, so the
//! result never depends on the worker count.
//!
//! Store file layout (`runs.csv`):
//!
//! ```text
//! {"format":"tmspace-runs","version":1,...}      <- metadata, one JSON line
//! rule_number,input,halted,runtime,space,output_bits,step_bound
//! 2240,0,1,5,2,111,1000
//! 2241,0,0,-1,-1,-1,1000
//! ```
//!
//! `output_bits` is the final tape read left to right with leading blanks
//! stripped (`0` for a blank tape).

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cleanser::{SequenceKind, SequenceProfile};
use crate::rulecodec::{decode_u64, CodecError, SpaceParams};
use crate::simulator::{run, run_accelerated, Halt, Program, RunRecord, Tape};

pub const DEFAULT_STEP_BOUND: u64 = 1000;
pub const DEFAULT_DEEP_BOUND: u64 = 200_000;
pub const STORE_FILE: &str = "runs.csv";
pub const STORE_FORMAT: &str = "tmspace-runs";
pub const STORE_VERSION: u32 = 1;
const CHUNK: usize = 2048;

pub fn default_inputs() -> Vec<u32> {
    (0..=20).collect()
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error")]
    Csv(#[from] csv::Error),
    #[error("metadata error")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("malformed store: {0}")]
    Format(String),
    #[error("store metadata mismatch: {0}")]
    MetaMismatch(String),
    #[error("invalid batch: {0}")]
    InvalidSpec(String),
    #[error("rule {rule} input {input}: halted at bound {old_bound} but changed at bound {new_bound}")]
    Consistency {
        rule: u64,
        input: u32,
        old_bound: u64,
        new_bound: u64,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MachineSet {
    All,
    Explicit { rules: Vec<u64> },
    RandomSample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSpec {
    pub params: SpaceParams,
    pub inputs: Vec<u32>,
    pub step_bound: u64,
    pub machines: MachineSet,
    /// Use the divergence accelerator. Results are identical either way.
    pub accelerate: bool,
}

impl BatchSpec {
    /// Whole space, inputs 0..=20, bound 1000.
    pub fn new(params: SpaceParams) -> Self {
        Self {
            params,
            inputs: default_inputs(),
            step_bound: DEFAULT_STEP_BOUND,
            machines: MachineSet::All,
            accelerate: true,
        }
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.step_bound = bound;
        self
    }

    pub fn with_inputs(mut self, inputs: Vec<u32>) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn with_machines(mut self, machines: MachineSet) -> Self {
        self.machines = machines;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.inputs.is_empty() {
            return Err(HarnessError::InvalidSpec("no inputs".into()));
        }
        if self.inputs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::InvalidSpec("inputs must be strictly increasing".into()));
        }
        if self.step_bound == 0 {
            return Err(HarnessError::InvalidSpec("step bound must be positive".into()));
        }
        let size = self.params.space_size_u64().ok_or_else(|| {
            HarnessError::InvalidSpec(format!("space {} is too large to address with u64 rules", self.params))
        })?;
        match &self.machines {
            MachineSet::Explicit { rules } => {
                if let Some(&bad) = rules.iter().find(|&&r| r >= size) {
                    return Err(CodecError::RuleOutOfRange {
                        rule: BigUint::from(bad),
                        params: self.params,
                        size: BigUint::from(size),
                    }
                    .into());
                }
            }
            MachineSet::RandomSample { count, .. } if *count == 0 => {
                return Err(HarnessError::InvalidSpec("sample count must be at least 1".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Rule numbers this batch covers, ascending and without duplicates.
    pub fn rules(&self) -> Result<RuleList, HarnessError> {
        self.validate()?;
        let size = self.params.space_size_u64().expect("validated");
        Ok(match &self.machines {
            MachineSet::All => RuleList::Range(size),
            MachineSet::Explicit { rules } => {
                let mut v = rules.clone();
                v.sort_unstable();
                v.dedup();
                RuleList::Listed(v)
            }
            MachineSet::RandomSample { count, seed } => RuleList::Listed(sample_rules(size, *count, *seed)),
        })
    }
}

/// Draws `count` rule numbers uniformly (with replacement) and returns them
/// sorted and deduplicated.
pub fn sample_rules(space_size: u64, count: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<u64> = (0..count).map(|_| rng.gen_range(0..space_size)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleList {
    /// `0..n`
    Range(u64),
    Listed(Vec<u64>),
}

impl RuleList {
    pub fn len(&self) -> u64 {
        match self {
            RuleList::Range(n) => *n,
            RuleList::Listed(v) => v.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: u64) -> u64 {
        match self {
            RuleList::Range(_) => i,
            RuleList::Listed(v) => v[i as usize],
        }
    }

    /// Position of the first rule strictly greater than `rule`.
    fn position_after(&self, rule: u64) -> u64 {
        match self {
            RuleList::Range(n) => (rule + 1).min(*n),
            RuleList::Listed(v) => v.partition_point(|&r| r <= rule) as u64,
        }
    }
}

/// All runs of one machine, in input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineRuns {
    pub rule_number: u64,
    pub records: Vec<RunRecord>,
}

impl MachineRuns {
    pub fn profile(&self, kind: SequenceKind) -> SequenceProfile {
        let values = self
            .records
            .iter()
            .map(|r| {
                r.outcome.as_ref().map(|h| match kind {
                    SequenceKind::Output => BigInt::from(h.output.value()),
                    SequenceKind::Runtime => BigInt::from(h.runtime),
                    SequenceKind::Space => BigInt::from(h.space),
                })
            })
            .collect();
        SequenceProfile::raw(kind, values)
    }

    /// Halts in exactly one step on every input.
    pub fn is_trivial(&self) -> bool {
        self.records
            .iter()
            .all(|r| r.outcome.as_ref().is_some_and(|h| h.runtime == 1))
    }
}

/// Simulates one machine on every input of the batch.
pub fn run_machine(params: SpaceParams, rule: u64, inputs: &[u32], bound: u64, accelerate: bool) -> MachineRuns {
    let program = Program::new(&decode_u64(rule, params).expect("rule validated against the space"));
    let records = inputs
        .iter()
        .map(|&n| {
            if accelerate {
                run_accelerated(&program, n, bound)
            } else {
                run(&program, n, bound)
            }
        })
        .collect();
    MachineRuns {
        rule_number: rule,
        records,
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
}

/// Runs every machine of `rules` from position `from`, handing each
/// machine to `sink` in ascending rule order.
pub fn run_rules<E>(
    spec: &BatchSpec,
    rules: &RuleList,
    from: u64,
    jobs: usize,
    mut sink: impl FnMut(MachineRuns) -> Result<(), E>,
) -> Result<(), E> {
    let workers = pool(jobs);
    let total = rules.len();
    let mut start = from;
    while start < total {
        let end = (start + CHUNK as u64).min(total);
        let chunk: Vec<MachineRuns> = workers.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| run_machine(spec.params, rules.get(i), &spec.inputs, spec.step_bound, spec.accelerate))
                .collect()
        });
        for m in chunk {
            sink(m)?;
        }
        start = end;
    }
    Ok(())
}

/// Streams the whole batch through `sink` without keeping it in memory.
pub fn for_each_machine<E>(
    spec: &BatchSpec,
    jobs: usize,
    sink: impl FnMut(MachineRuns) -> Result<(), E>,
) -> Result<(), E>
where
    E: From<HarnessError>,
{
    let rules = spec.rules()?;
    run_rules(spec, &rules, 0, jobs, sink)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreMeta {
    pub format: String,
    pub version: u32,
    pub states: u32,
    pub colors: u32,
    pub inputs: Vec<u32>,
    pub step_bound: u64,
    pub machine_set: MachineSet,
    /// Free-form description of any filter applied while sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<String>,
    pub code_version: String,
}

impl StoreMeta {
    pub fn for_spec(spec: &BatchSpec) -> Self {
        Self {
            format: STORE_FORMAT.into(),
            version: STORE_VERSION,
            states: spec.params.states(),
            colors: spec.params.colors(),
            inputs: spec.inputs.clone(),
            step_bound: spec.step_bound,
            machine_set: spec.machines.clone(),
            filter: None,
            code_version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn params(&self) -> Result<SpaceParams, HarnessError> {
        Ok(SpaceParams::new(self.states, self.colors)?)
    }

    /// True for stores holding a sample rather than a whole space.
    pub fn is_sample(&self) -> bool {
        !matches!(self.machine_set, MachineSet::All)
    }
}

/// In-memory run store: machines in ascending rule order, each with one
/// record per input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStore {
    pub meta: StoreMeta,
    machines: Vec<MachineRuns>,
}

impl RunStore {
    pub fn new(meta: StoreMeta) -> Self {
        Self {
            meta,
            machines: Vec::new(),
        }
    }

    /// Appends a machine; rules must arrive in ascending order.
    pub fn push(&mut self, m: MachineRuns) -> Result<(), HarnessError> {
        if let Some(last) = self.machines.last() {
            if last.rule_number >= m.rule_number {
                return Err(HarnessError::Format(format!(
                    "rule {} arrived after rule {}",
                    m.rule_number, last.rule_number
                )));
            }
        }
        self.machines.push(m);
        Ok(())
    }

    pub fn machines(&self) -> &[MachineRuns] {
        &self.machines
    }

    pub fn into_machines(self) -> Vec<MachineRuns> {
        self.machines
    }

    pub fn machine(&self, rule: u64) -> Option<&MachineRuns> {
        self.machines
            .binary_search_by_key(&rule, |m| m.rule_number)
            .ok()
            .map(|i| &self.machines[i])
    }

    pub fn records(&self) -> impl Iterator<Item = &RunRecord> {
        self.machines.iter().flat_map(|m| m.records.iter())
    }

    pub fn record_count(&self) -> usize {
        self.machines.iter().map(|m| m.records.len()).sum()
    }

    pub fn write_to(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = StoreWriter::create(path, &self.meta)?;
        for m in &self.machines {
            w.append(m)?;
        }
        w.finish()
    }

    pub fn read_from(path: &Path) -> Result<Self, HarnessError> {
        let reader = StoreReader::open(path)?;
        let mut store = RunStore::new(reader.meta().clone());
        for m in reader {
            store.push(m?)?;
        }
        Ok(store)
    }
}

/// Runs a batch into memory.
pub fn run_space(spec: &BatchSpec, jobs: usize) -> Result<RunStore, HarnessError> {
    let mut store = RunStore::new(StoreMeta::for_spec(spec));
    for_each_machine(spec, jobs, |m| store.push(m))?;
    Ok(store)
}

/// Runs a batch into `dir/runs.csv`. With `resume`, an existing store with
/// identical metadata is continued after its last complete machine.
pub fn run_space_to_dir(spec: &BatchSpec, dir: &Path, jobs: usize, resume: bool) -> Result<u64, HarnessError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(STORE_FILE);
    let meta = StoreMeta::for_spec(spec);
    let rules = spec.rules()?;
    let (mut writer, from) = if resume && path.exists() {
        let (w, last) = StoreWriter::resume(&path, &meta)?;
        let from = last.map_or(0, |r| rules.position_after(r));
        (w, from)
    } else {
        (StoreWriter::create(&path, &meta)?, 0)
    };
    let mut written = from;
    run_rules(spec, &rules, from, jobs, |m| {
        written += 1;
        writer.append(&m)
    })?;
    writer.finish()?;
    Ok(written)
}

/// Reruns `machines` at `new_bound`, replacing their records. Records that
/// halted before must come back identical.
pub fn rerun_subset(store: &RunStore, machines: &[u64], new_bound: u64, jobs: usize) -> Result<RunStore, HarnessError> {
    let params = store.meta.params()?;
    let mut targets: Vec<u64> = machines.to_vec();
    targets.sort_unstable();
    targets.dedup();
    for &r in &targets {
        if store.machine(r).is_none() {
            return Err(HarnessError::InvalidSpec(format!("rule {r} is not in the store")));
        }
    }
    let spec = BatchSpec {
        params,
        inputs: store.meta.inputs.clone(),
        step_bound: new_bound,
        machines: MachineSet::Explicit { rules: targets.clone() },
        accelerate: true,
    };
    let mut fresh = Vec::with_capacity(targets.len());
    for_each_machine(&spec, jobs, |m: MachineRuns| -> Result<(), HarnessError> {
        let old = store.machine(m.rule_number).expect("checked above");
        check_monotone(old, &m)?;
        fresh.push(m);
        Ok(())
    })?;
    let mut out = RunStore::new(store.meta.clone());
    let mut fresh = fresh.into_iter().peekable();
    for m in store.machines() {
        match fresh.peek() {
            Some(f) if f.rule_number == m.rule_number => out.machines.push(fresh.next().expect("peeked")),
            _ => out.machines.push(m.clone()),
        }
    }
    Ok(out)
}

fn check_monotone(old: &MachineRuns, new: &MachineRuns) -> Result<(), HarnessError> {
    for (a, b) in old.records.iter().zip(&new.records) {
        if b.step_bound < a.step_bound {
            return Err(HarnessError::InvalidSpec(format!(
                "new bound {} is below the stored bound {}",
                b.step_bound, a.step_bound
            )));
        }
        if a.outcome.is_some() && a.outcome != b.outcome {
            return Err(HarnessError::Consistency {
                rule: a.rule_number,
                input: a.input,
                old_bound: a.step_bound,
                new_bound: b.step_bound,
            });
        }
    }
    Ok(())
}

/// Output tuples used to filter a sample.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleFilter {
    /// Keep only machines whose convergent outputs agree with one of these
    /// output tuples (`None` = divergent).
    pub targets: Option<Vec<Vec<Option<BigUint>>>>,
    /// Drop machines that halt in one step on every input.
    pub drop_trivial: bool,
}

impl SampleFilter {
    pub fn accepts(&self, m: &MachineRuns) -> bool {
        if self.drop_trivial && m.is_trivial() {
            return false;
        }
        match &self.targets {
            None => true,
            Some(targets) => {
                let outputs: Vec<Option<BigUint>> = m.records.iter().map(|r| r.output_value()).collect();
                outputs.iter().any(Option::is_some) && targets.iter().any(|t| agrees_on_convergent(&outputs, t))
            }
        }
    }

    fn describe(&self) -> Option<String> {
        let mut parts = Vec::new();
        if let Some(t) = &self.targets {
            parts.push(format!("convergent outputs match one of {} target functions", t.len()));
        }
        if self.drop_trivial {
            parts.push("one-step machines removed".to_string());
        }
        (!parts.is_empty()).then(|| parts.join("; "))
    }
}

/// Every convergent output equals the target's value at that input.
pub fn agrees_on_convergent(outputs: &[Option<BigUint>], target: &[Option<BigUint>]) -> bool {
    outputs.len() == target.len()
        && outputs
            .iter()
            .zip(target)
            .all(|(o, t)| o.is_none() || (t.is_some() && o == t))
}

/// Draws a seeded random sample and keeps the machines the filter accepts.
pub fn sample_space(
    params: SpaceParams,
    count: u64,
    seed: u64,
    bound: u64,
    filter: &SampleFilter,
    jobs: usize,
) -> Result<RunStore, HarnessError> {
    let spec = BatchSpec::new(params)
        .with_bound(bound)
        .with_machines(MachineSet::RandomSample { count, seed });
    let mut meta = StoreMeta::for_spec(&spec);
    meta.filter = filter.describe();
    let mut store = RunStore::new(meta);
    for_each_machine(&spec, jobs, |m| {
        if filter.accepts(&m) {
            store.push(m)?;
        }
        Ok::<(), HarnessError>(())
    })?;
    Ok(store)
}

/// Streaming writer for `runs.csv`.
pub struct StoreWriter {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl StoreWriter {
    pub fn create(path: &Path, meta: &StoreMeta) -> Result<Self, HarnessError> {
        let mut file = BufWriter::new(File::create(path).map_err(io_err(path))?);
        serde_json::to_writer(&mut file, meta)?;
        file.write_all(b"\n").map_err(io_err(path))?;
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        inner.write_record(HEADER)?;
        Ok(Self {
            path: path.to_path_buf(),
            inner,
        })
    }

    /// Reopens an existing store, dropping any trailing partial machine.
    /// Returns the last complete rule, if any.
    pub fn resume(path: &Path, meta: &StoreMeta) -> Result<(Self, Option<u64>), HarnessError> {
        let (found, last, good_len) = scan_complete_prefix(path)?;
        if &found != meta {
            return Err(HarnessError::MetaMismatch(format!(
                "{} was produced by a different batch",
                path.display()
            )));
        }
        let file = OpenOptions::new().write(true).open(path).map_err(io_err(path))?;
        file.set_len(good_len).map_err(io_err(path))?;
        let mut file = BufWriter::new(file);
        file.seek(SeekFrom::End(0)).map_err(io_err(path))?;
        let inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        Ok((
            Self {
                path: path.to_path_buf(),
                inner,
            },
            last,
        ))
    }

    pub fn append(&mut self, m: &MachineRuns) -> Result<(), HarnessError> {
        for r in &m.records {
            let row = encode_row(r);
            self.inner.write_record(&row)?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), HarnessError> {
        self.inner.flush().map_err(io_err(&self.path))
    }
}

const HEADER: [&str; 7] = ["rule_number", "input", "halted", "runtime", "space", "output_bits", "step_bound"];

fn encode_row(r: &RunRecord) -> [String; 7] {
    match &r.outcome {
        Some(h) => [
            r.rule_number.to_string(),
            r.input.to_string(),
            "1".into(),
            h.runtime.to_string(),
            h.space.to_string(),
            h.output.to_bits(),
            r.step_bound.to_string(),
        ],
        None => [
            r.rule_number.to_string(),
            r.input.to_string(),
            "0".into(),
            "-1".into(),
            "-1".into(),
            "-1".into(),
            r.step_bound.to_string(),
        ],
    }
}

fn decode_row(row: &csv::StringRecord) -> Result<RunRecord, HarnessError> {
    let bad = || HarnessError::Format(format!("bad row {:?}", row));
    if row.len() != HEADER.len() {
        return Err(bad());
    }
    let num = |i: usize| row[i].parse::<u64>().map_err(|_| bad());
    let rule_number = num(0)?;
    let input = row[1].parse::<u32>().map_err(|_| bad())?;
    let step_bound = num(6)?;
    let outcome = match &row[2] {
        "1" => Some(Halt {
            runtime: num(3)?,
            space: num(4)?,
            output: Tape::from_bits(&row[5]).ok_or_else(bad)?,
        }),
        "0" => None,
        _ => return Err(bad()),
    };
    Ok(RunRecord {
        rule_number,
        input,
        step_bound,
        outcome,
    })
}

fn read_meta(reader: &mut impl BufRead, path: &Path) -> Result<(StoreMeta, u64), HarnessError> {
    let mut line = String::new();
    let n = reader.read_line(&mut line).map_err(io_err(path))?;
    let meta: StoreMeta = serde_json::from_str(line.trim_end())?;
    if meta.format != STORE_FORMAT {
        return Err(HarnessError::Format(format!("unknown format `{}`", meta.format)));
    }
    if meta.version != STORE_VERSION {
        return Err(HarnessError::MetaMismatch(format!(
            "schema version {} (expected {STORE_VERSION})",
            meta.version
        )));
    }
    Ok((meta, n as u64))
}

/// Returns the metadata, last complete rule and byte length of the complete
/// prefix of a store file.
fn scan_complete_prefix(path: &Path) -> Result<(StoreMeta, Option<u64>, u64), HarnessError> {
    let mut reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let (meta, meta_len) = read_meta(&mut reader, path)?;
    let per_machine = meta.inputs.len();
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header_len = {
        let h = csv.headers()?.clone();
        csv.position().byte()
            .max(h.as_slice().len() as u64)
    };
    let mut good_len = meta_len + header_len;
    let mut last_complete = None;
    let mut current: Option<(u64, usize)> = None;
    let mut record = csv::StringRecord::new();
    loop {
        let ok = match csv.read_record(&mut record) {
            Ok(ok) => ok,
            // A torn final line is expected after an interruption.
            Err(_) => break,
        };
        if !ok {
            break;
        }
        let r = match decode_row(&record) {
            Ok(r) => r,
            Err(_) => break,
        };
        let count = match current {
            Some((rule, c)) if rule == r.rule_number => c + 1,
            _ => 1,
        };
        current = Some((r.rule_number, count));
        if count == per_machine {
            last_complete = Some(r.rule_number);
            good_len = meta_len + csv.position().byte();
        }
    }
    Ok((meta, last_complete, good_len))
}

/// Streaming reader yielding one machine at a time.
pub struct StoreReader {
    meta: StoreMeta,
    csv: csv::Reader<BufReader<File>>,
    pending: Option<RunRecord>,
    done: bool,
}

impl StoreReader {
    pub fn open(path: &Path) -> Result<Self, HarnessError> {
        let mut reader = BufReader::new(File::open(path).map_err(io_err(path))?);
        let (meta, _) = read_meta(&mut reader, path)?;
        let csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        Ok(Self {
            meta,
            csv,
            pending: None,
            done: false,
        })
    }

    /// Opens `dir/runs.csv`, or `dir` itself when it is a file.
    pub fn open_dir(dir: &Path) -> Result<Self, HarnessError> {
        if dir.is_file() {
            Self::open(dir)
        } else {
            Self::open(&dir.join(STORE_FILE))
        }
    }

    pub fn meta(&self) -> &StoreMeta {
        &self.meta
    }

    fn next_record(&mut self) -> Result<Option<RunRecord>, HarnessError> {
        if let Some(r) = self.pending.take() {
            return Ok(Some(r));
        }
        let mut row = csv::StringRecord::new();
        if self.csv.read_record(&mut row)? {
            Ok(Some(decode_row(&row)?))
        } else {
            Ok(None)
        }
    }
}

impl Iterator for StoreReader {
    type Item = Result<MachineRuns, HarnessError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let first = match self.next_record() {
            Ok(Some(r)) => r,
            Ok(None) => {
                self.done = true;
                return None;
            }
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        let rule = first.rule_number;
        let mut records = vec![first];
        loop {
            match self.next_record() {
                Ok(Some(r)) if r.rule_number == rule => records.push(r),
                Ok(Some(r)) => {
                    self.pending = Some(r);
                    break;
                }
                Ok(None) => break,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        if records.len() != self.meta.inputs.len() {
            self.done = true;
            return Some(Err(HarnessError::Format(format!(
                "rule {rule} has {} records, expected {}",
                records.len(),
                self.meta.inputs.len()
            ))));
        }
        Some(Ok(MachineRuns {
            rule_number: rule,
            records,
        }))
    }
}
