use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use tmspace_core::analyzer::{
    definable_sets, determinant_prefix, distinct_spaces, distinct_total_runtimes, runtime_sequence_census,
};
use tmspace_core::calibration::calibrate;
use tmspace_core::compare::{
    class_correlation, class_distribution, essential_speedups, match_functions, match_sampled, speedup_stats,
};
use tmspace_core::export;
use tmspace_core::harness::{
    rerun_subset, run_space_to_dir, sample_space, BatchSpec, MachineSet, RunStore, SampleFilter,
    StoreReader, DEFAULT_DEEP_BOUND, DEFAULT_STEP_BOUND, STORE_FILE,
};
use tmspace_core::pipeline::{analyze_store, cleanse_machine, SpaceAnalysis, VerifyPolicy};
use tmspace_core::rulecodec::{decode, DigitLayout, SpaceParams};
use tmspace_core::simulator::{trace, Program};

#[derive(Parser)]
#[command(name = "tmspace", version, about = "Explore small one-sided Turing machine spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the size of a space and decode rule numbers.
    Enumerate {
        #[arg(long, default_value = "2,2")]
        space: SpaceParams,
        /// Rules to decode, e.g. `0..9` or `378,1351`.
        #[arg(long)]
        rules: Option<NumberList>,
    },
    /// Run a whole space (or an explicit rule list) into a store directory.
    Run {
        #[command(flatten)]
        batch: BatchArgs,
        /// Restrict to these rules.
        #[arg(long)]
        rules: Option<NumberList>,
        #[arg(long)]
        out: PathBuf,
        /// Continue an interrupted run in `out`.
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Rerun machines of a store at a higher bound.
    Rerun {
        store: PathBuf,
        #[arg(long)]
        bound: u64,
        /// Rules to rerun; defaults to every machine with a divergent input.
        #[arg(long)]
        rules: Option<NumberList>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Draw a seeded random sample of a space.
    Sample {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only machines agreeing with a function of this store.
        #[arg(long)]
        targets: Option<PathBuf>,
        /// Drop machines that halt in one step on every input.
        #[arg(long)]
        drop_trivial: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write the cleansed sequences of every machine as CSV.
    Cleanse {
        store: PathBuf,
        #[command(flatten)]
        verify: VerifyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group machines into functions and algorithms.
    Analyze {
        store: PathBuf,
        /// Cleanse before grouping.
        #[arg(long)]
        cleansed: bool,
        #[command(flatten)]
        verify: VerifyArgs,
        /// Directory for CSV exports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a store against one of a richer space.
    Compare {
        baseline: PathBuf,
        richer: PathBuf,
        #[command(flatten)]
        verify: VerifyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single reports.
    Report {
        #[command(subcommand)]
        report: Report,
    },
    /// Score every digit layout against the rule-number anchors.
    Calibrate,
}

#[derive(Subcommand)]
enum Report {
    /// Raw halting-time histogram.
    Histogram {
        store: PathBuf,
        /// Emit SVG instead of CSV.
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runtime sequences by machine count.
    Census {
        store: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        svg: bool,
        #[command(flatten)]
        verify: VerifyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Definable sets and their complements.
    Definable {
        store: PathBuf,
        #[command(flatten)]
        verify: VerifyArgs,
    },
    /// Function table.
    Functions {
        store: PathBuf,
        #[command(flatten)]
        verify: VerifyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tape evolution of one machine on one input.
    Trace {
        #[arg(long, default_value = "2,2")]
        space: SpaceParams,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        input: u32,
        #[arg(long, default_value_t = 200)]
        steps: u64,
    },
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long, default_value = "2,2")]
    space: SpaceParams,
    #[arg(long, default_value_t = DEFAULT_STEP_BOUND)]
    bound: u64,
    /// Inclusive range `a..b` or a list.
    #[arg(long, default_value = "0..20")]
    inputs: NumberList,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verification {
    /// Rerun filled inputs at the verification bound.
    Deep,
    /// Keep extrapolated values unchecked.
    Predict,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "deep")]
    verify: Verification,
    #[arg(long, default_value_t = DEFAULT_DEEP_BOUND)]
    verify_bound: u64,
}

impl VerifyArgs {
    fn policy(&self) -> VerifyPolicy {
        match self.verify {
            Verification::Deep => VerifyPolicy::Deep { bound: self.verify_bound },
            Verification::Predict => VerifyPolicy::PredictOnly,
        }
    }
}

/// Numbers given as `a..b` (inclusive), single values or a comma-separated
/// mixture of both.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NumberList(Vec<u64>);

impl FromStr for NumberList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}"));
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                    if b < a {
                        return Err(format!("empty range `{part}`"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(part)?),
            }
        }
        if out.is_empty() {
            return Err("empty list".to_string());
        }
        Ok(Self(out))
    }
}

impl NumberList {
    fn inputs(&self) -> Result<Vec<u32>> {
        self.0.iter().map(|&v| u32::try_from(v).context("input too large")).collect()
    }
}

fn jobs(j: Option<usize>) -> usize {
    j.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn open_store(path: &Path) -> Result<StoreReader> {
    let reader = if path.is_dir() { StoreReader::open_dir(path) } else { StoreReader::open(path) };
    reader.with_context(|| format!("opening store {}", path.display()))
}

fn load(path: &Path, policy: VerifyPolicy) -> Result<SpaceAnalysis> {
    Ok(analyze_store(open_store(path)?, policy)?)
}

fn store_file(out: &Path) -> PathBuf {
    if out.extension().is_some() {
        out.to_path_buf()
    } else {
        out.join(STORE_FILE)
    }
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn export_to(dir: &Path, name: &str, f: impl FnOnce(File) -> export::ExportResult) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    f(file).with_context(|| format!("writing {}", path.display()))
}

fn batch_spec(b: &BatchArgs) -> Result<BatchSpec> {
    let spec = BatchSpec::new(b.space)
        .with_bound(b.bound)
        .with_inputs(b.inputs.inputs()?);
    spec.validate()?;
    Ok(spec)
}

fn print_summary(a: &SpaceAnalysis) {
    let c = &a.catalog;
    println!("{} functions, {} algorithms", c.functions.len(), c.algorithms.len());
    println!("machines: {}", c.machine_count());
    let census = runtime_sequence_census(c);
    println!(
        "runtime sequences: {} ({} over total functions); space sequences: {}",
        census.distinct(),
        distinct_total_runtimes(c),
        distinct_spaces(c)
    );
    if !c.functions.is_empty() {
        let p = determinant_prefix(&c.functions);
        println!("determinant prefix: {} (combinations {:?})", p.length, p.combinations);
    }
    let sets = definable_sets(c);
    println!(
        "definable sets: {} ({} complement-closed, {} not)",
        sets.sets.len(),
        sets.complement_closed,
        sets.not_closed
    );
    println!(
        "halting fraction: raw {:.5}, cleansed {:.5}; within 100 steps {:.5}",
        a.raw_histogram.halting_fraction(),
        a.cleansed_histogram.halting_fraction(),
        a.raw_histogram.fraction_within(100)
    );
    let s = &a.stats;
    if s.values_filled > 0 {
        println!(
            "cleansing: {} values filled in {} machines; verified {} confirmed, {} unconfirmable, {} contradicted, {} new",
            s.values_filled, s.machines_filled, s.confirmed, s.unconfirmable, s.contradicted, s.new_values
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enumerate { space, rules } => {
            println!("{space}: {} machines", space.space_size());
            if let Some(rules) = rules {
                for r in rules.0 {
                    println!("{}", decode(&r.into(), space)?);
                }
            }
        }
        Command::Run { batch, rules, out, resume, jobs: j } => {
            let mut spec = batch_spec(&batch)?;
            if let Some(r) = rules {
                spec = spec.with_machines(MachineSet::Explicit { rules: r.0 });
            }
            let machines = run_space_to_dir(&spec, &out, jobs(j), resume)?;
            println!("{} machines, {} records", machines, machines * spec.inputs.len() as u64);
        }
        Command::Rerun { store, bound, rules, out, jobs: j } => {
            let old = RunStore::read_from(&store_file(&store))?;
            let targets = match rules {
                Some(r) => r.0,
                None => old
                    .machines()
                    .iter()
                    .filter(|m| m.records.iter().any(|r| !r.halted()))
                    .map(|m| m.rule_number)
                    .collect(),
            };
            let new = rerun_subset(&old, &targets, bound, jobs(j))?;
            let path = store_file(&out);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            new.write_to(&path)?;
            println!("{} machines rerun at bound {bound}", targets.len());
        }
        Command::Sample { batch, count, seed, targets, drop_trivial, out, jobs: j } => {
            let spec = batch_spec(&batch)?;
            let targets = match targets {
                Some(p) => Some(
                    load(&p, VerifyPolicy::Deep { bound: DEFAULT_DEEP_BOUND })?
                        .catalog
                        .functions
                        .iter()
                        .map(|f| f.outputs.iter().map(|v| v.as_ref().and_then(|x| x.to_biguint())).collect())
                        .collect(),
                ),
                None => None,
            };
            let filter = SampleFilter { targets, drop_trivial };
            let store = sample_space(spec.params, count, seed, spec.step_bound, &filter, jobs(j))?;
            let path = store_file(&out);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            store.write_to(&path)?;
            println!("{} of {count} sampled machines kept", store.machines().len());
        }
        Command::Cleanse { store, verify, out } => {
            let reader = open_store(&store)?;
            let meta = reader.meta().clone();
            let params = meta.params()?;
            let mut w = csv_writer(out.as_deref())?;
            w.write_record(["rule_number", "input", "output", "runtime", "space", "filled"])?;
            for m in reader {
                let m = m?;
                let (c, _) = cleanse_machine(params, &meta.inputs, &m, verify.policy());
                for (i, input) in meta.inputs.iter().enumerate() {
                    let cell = |v: &Option<BigInt>| v.as_ref().map_or("-1".to_string(), |x| x.to_string());
                    let filled = c.raw_divergent.contains(&i) && c.runtimes[i].is_some();
                    w.write_record([
                        c.rule_number.to_string(),
                        input.to_string(),
                        cell(&c.outputs[i]),
                        cell(&c.runtimes[i]),
                        cell(&c.spaces[i]),
                        filled.to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
        Command::Analyze { store, cleansed, verify, out } => {
            let policy = if cleansed { verify.policy() } else { VerifyPolicy::Raw };
            let a = load(&store, policy)?;
            print_summary(&a);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let c = &a.catalog;
                export_to(&dir, "functions.csv", |f| export::functions_csv(c, f))?;
                export_to(&dir, "algorithms.csv", |f| export::algorithms_csv(c, f))?;
                export_to(&dir, "histogram.csv", |f| export::histogram_csv(&a.raw_histogram, f))?;
                export_to(&dir, "census.csv", |f| export::census_csv(&runtime_sequence_census(c), f))?;
                export_to(&dir, "definable_sets.csv", |f| export::definable_sets_csv(&definable_sets(c), f))?;
                export_to(&dir, "overview.csv", |f| export::overview_csv(c, f))?;
            }
        }
        Command::Compare { baseline, richer, verify, out } => {
            let policy = verify.policy();
            let sampled = open_store(&richer)?.meta().is_sample();
            let a = load(&baseline, policy)?;
            let b = load(&richer, policy)?;
            let set = if sampled {
                match_sampled(&a.catalog, &b.catalog)
            } else {
                match_functions(&a.catalog, &b.catalog)?
            };
            let r = speedup_stats(&set);
            if sampled {
                println!("sample-conditioned: the richer store is a random sample");
            }
            println!("{} matched functions", set.matches.len());
            println!(
                "{} functions ({:.3}) have a faster algorithm; {} of {} algorithms faster, {} slower",
                r.functions_with_faster,
                r.fraction_with_faster(),
                r.faster_algorithms,
                r.richer_algorithms,
                r.slower_algorithms
            );
            let f = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.6}"));
            println!(
                "speed-up: average {}, max {}; slowdown: average {}, max {}",
                f(r.average_speedup),
                f(r.max_speedup),
                f(r.average_slowdown),
                f(r.max_slowdown)
            );
            println!("sign test: P <= 10^{:.1}", r.sign_test_log10());
            println!("essential speed-ups: {}", essential_speedups(&set).len());
            let da = class_distribution(&a.catalog);
            let db = class_distribution(&b.catalog);
            for (name, d) in [("baseline", &da), ("richer", &db)] {
                let fr: Vec<String> = d.fractions().iter().map(|x| format!("{x:.6}")).collect();
                println!("{name} class fractions (n, n^2, n^3, n^4, exp): {}", fr.join(" "));
            }
            if let Some((_, _, r)) = class_correlation(&[da.clone(), db.clone()]).first() {
                println!("class correlation: {}", f(*r));
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                export_to(&dir, "function_classes.csv", |f| export::function_classes_csv(&set, f))?;
                export_to(&dir, "class_fractions.csv", |f| {
                    export::class_fractions_csv(&[("baseline", &da), ("richer", &db)], f)
                })?;
                export_to(&dir, "speedups.csv", |f| export::speedup_csv(&r, f))?;
            }
        }
        Command::Report { report } => run_report(report)?,
        Command::Calibrate => {
            let scores = calibrate();
            let yes = |b: bool| if b { "pass" } else { "fail" };
            for s in &scores {
                let a = s.anchors;
                println!(
                    "{}: table {}, periodic {}, stepped {}, deep {}",
                    s.layout,
                    yes(a.table_entry),
                    yes(a.periodic_runtimes),
                    yes(a.stepped_runtimes),
                    a.deep_runtime.map_or("skipped", yes)
                );
            }
            let ok: Vec<_> = scores.iter().filter(|s| s.anchors.runtime_consistent()).collect();
            println!("{} of {} layouts reproduce every runtime anchor", ok.len(), scores.len());
            println!("frozen layout: {}", DigitLayout::WOLFRAM);
            if !ok.iter().any(|s| s.layout == DigitLayout::WOLFRAM) {
                bail!("frozen layout fails the runtime anchors");
            }
        }
    }
    Ok(())
}

fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(writer(out)?))
}

fn run_report(report: Report) -> Result<()> {
    match report {
        Report::Histogram { store, svg, out } => {
            let a = load(&store, VerifyPolicy::Raw)?;
            let h = &a.raw_histogram;
            let mut w = writer(out.as_deref())?;
            if svg {
                w.write_all(export::histogram_svg(h).as_bytes())?;
            } else {
                export::histogram_csv(h, &mut w)?;
            }
            w.flush()?;
            eprintln!(
                "halting within 100 steps: {:.5}; halting at all: {:.5}",
                h.fraction_within(100),
                h.halting_fraction()
            );
        }
        Report::Census { store, top, svg, verify, out } => {
            let a = load(&store, verify.policy())?;
            let census = runtime_sequence_census(&a.catalog);
            let mut w = writer(out.as_deref())?;
            if svg {
                w.write_all(export::census_svg(&census).as_bytes())?;
            } else {
                for (seq, n) in census.top(top) {
                    writeln!(w, "{n}\t{}", tmspace_core::compare::format_tuple(seq))?;
                }
            }
            w.flush()?;
        }
        Report::Definable { store, verify } => {
            let a = load(&store, verify.policy())?;
            let report = definable_sets(&a.catalog);
            for s in &report.sets {
                let inputs: Vec<String> = s.inputs.iter().map(u32::to_string).collect();
                println!(
                    "{{{}}}\twitnesses {}\tcomplement {}",
                    inputs.join(","),
                    s.witnesses.len(),
                    if s.complement_definable { "definable" } else { "not definable" }
                );
            }
            println!(
                "{} sets, {} complement-closed, {} not",
                report.sets.len(),
                report.complement_closed,
                report.not_closed
            );
        }
        Report::Functions { store, verify, out } => {
            let a = load(&store, verify.policy())?;
            let w = writer(out.as_deref())?;
            export::functions_csv(&a.catalog, w)?;
        }
        Report::Trace { space, rule, input, steps } => {
            let rule: BigUint = rule.parse().context("bad rule number")?;
            let m = decode(&rule, space)?;
            println!("{m}");
            let tapes = trace(&Program::new(&m), input, steps);
            let width = tapes.iter().map(|t| t.significant().len()).max().unwrap_or(1).max(1) + 1;
            for (i, t) in tapes.iter().enumerate() {
                println!("{i:>6} {}", t.render(width));
            }
        }
    }
    Ok(())
}

/// `println!` panics once the reader of a pipe goes away (`tmspace ... | head`);
/// treat that as a normal end of output.
fn quiet_on_closed_stdout() {
    let default = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .map(String::as_str)
            .or_else(|| info.payload().downcast_ref::<&str>().copied())
            .unwrap_or("");
        if msg.starts_with("failed printing to stdout") {
            std::process::exit(0);
        }
        default(info);
    }));
}

fn main() -> ExitCode {
    quiet_on_closed_stdout();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
