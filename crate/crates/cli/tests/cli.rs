use std::path::Path;
use std::process::{Command, Output};

use tmspace_core::harness::{BatchSpec, StoreReader};
use tmspace_core::pipeline::{analyze_store, VerifyPolicy};
use tmspace_core::rulecodec::SpaceParams;

fn tmspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmspace")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn run22(dir: &Path) -> String {
    let out = dir.join("runs22");
    let o = tmspace(&["run", "--space", "2,2", "--bound", "1000", "--inputs", "0..20", "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "4096 machines, 86016 records");
    out.to_str().unwrap().to_string()
}

#[test]
fn run_then_analyze() {
    let tmp = tempfile::tempdir().unwrap();
    let store = run22(tmp.path());
    let lines = std::fs::read_to_string(Path::new(&store).join("runs.csv")).unwrap().lines().count();
    // Metadata line, CSV header, then one row per (machine, input).
    assert_eq!(lines, 2 + 4096 * 21);

    let o = tmspace(&["analyze", &store, "--cleansed"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("74 functions, 138 algorithms"));

    // Same numbers as the library calls.
    let lib = analyze_store(StoreReader::open_dir(Path::new(&store)).unwrap(), VerifyPolicy::Deep { bound: 200_000 }).unwrap();
    assert_eq!(lib.catalog.functions.len(), 74);
    assert_eq!(lib.catalog.algorithms.len(), 138);
    let direct = tmspace_core::harness::run_space(&BatchSpec::new(SpaceParams::binary(2)), 1).unwrap();
    assert_eq!(direct.record_count(), 86_016);

    let exports = tmp.path().join("exports");
    let o = tmspace(&["analyze", &store, "--cleansed", "--out", exports.to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["functions.csv", "algorithms.csv", "histogram.csv", "census.csv", "definable_sets.csv", "overview.csv"] {
        assert!(exports.join(f).exists(), "{f}");
    }
    let functions = std::fs::read_to_string(exports.join("functions.csv")).unwrap();
    assert_eq!(functions.lines().count(), 75);
}

#[test]
fn histogram_report() {
    let tmp = tempfile::tempdir().unwrap();
    let store = run22(tmp.path());
    let o = tmspace(&["report", "histogram", &store, "--svg"]);
    assert!(o.status.success());
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    let err = String::from_utf8(o.stderr).unwrap();
    let within: f64 = err
        .split("halting within 100 steps: ")
        .nth(1)
        .and_then(|s| s.split(';').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((within - 0.666).abs() <= 0.001, "{within}");

    let csv_path = tmp.path().join("h.csv");
    let o = tmspace(&["report", "histogram", &store, "--out", csv_path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(csv_path).unwrap().lines().count(), 1001);
}

#[test]
fn rerun_and_census() {
    let tmp = tempfile::tempdir().unwrap();
    let store = run22(tmp.path());
    let deep = tmp.path().join("deep");
    let o = tmspace(&["rerun", &store, "--bound", "10000000", "--rules", "378,1351", "--out", deep.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let reader = StoreReader::open_dir(&deep).unwrap();
    let m = reader.map(Result::unwrap).find(|m| m.rule_number == 378).unwrap();
    assert_eq!(m.records[20].outcome.as_ref().unwrap().runtime, 8_388_605);

    let o = tmspace(&["report", "census", &store, "--top", "2", "--verify", "predict"]);
    let text = stdout(&o);
    assert!(text.starts_with("2048\t{1,1,1"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn sample_and_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let store = run22(tmp.path());
    let sample = tmp.path().join("sample");
    let args = ["sample", "--space", "3,2", "--count", "3000", "--seed", "5", "--drop-trivial", "--out", sample.to_str().unwrap()];
    assert!(tmspace(&args).status.success());
    let again = tmp.path().join("again");
    let mut args2 = args;
    args2[9] = again.to_str().unwrap();
    assert!(tmspace(&args2).status.success());
    assert!(std::fs::read(sample.join("runs.csv")).unwrap() == std::fs::read(again.join("runs.csv")).unwrap());

    let o = tmspace(&["compare", &store, sample.to_str().unwrap(), "--verify", "predict"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("sample-conditioned"));

    let o = tmspace(&["compare", &store, &store, "--verify", "predict"]);
    let text = stdout(&o);
    assert!(text.contains("74 matched functions"));
    assert!(text.contains("0 functions (0.000) have a faster algorithm"));
    assert!(text.contains("essential speed-ups: 0"));
}

#[test]
fn enumerate_trace_and_calibrate() {
    let o = tmspace(&["enumerate", "--space", "3,2", "--rules", "0"]);
    assert!(stdout(&o).starts_with("(3,2): 2985984 machines"));
    let o = tmspace(&["report", "trace", "--rule", "1536", "--input", "0"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3, "{text}");
    let o = tmspace(&["calibrate"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 of 96 layouts reproduce every runtime anchor"));
}

#[test]
fn exit_codes() {
    assert_eq!(tmspace(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tmspace(&["run", "--inputs", "5..2", "--out", "x"]).status.code(), Some(1));
    assert_eq!(tmspace(&["analyze", "/definitely/not/here"]).status.code(), Some(2));
    assert_eq!(tmspace(&["--help"]).status.code(), Some(0));

    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("runs.csv");
    std::fs::write(&bad, "{\"format\":\"something-else\"}\n").unwrap();
    assert_eq!(tmspace(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
}
