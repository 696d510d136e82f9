use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gbach::bench::{generate_rush_hour, Variant};
use gbach::checker::replay;
use gbach::parser::parse_program;
use gbach::trace::Trace;

fn program(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs").join(name)
}

fn gbach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbach")).args(args).env_remove("GBACH_MAX_STATES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
}

#[test]
fn parse_reports_errors_with_positions() {
    let ok = gbach(&["parse", program("producer_consumer.gbach").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = gbach(&["parse", program("unguarded.gbach").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let out = stdout(&bad);
    assert!(out.contains("unguarded.gbach:2:6: UnguardedProcedure"), "{out}");
    assert!(out.contains("1 error"), "{out}");
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let f = program("producer_consumer.gbach");
    let f = f.to_str().unwrap();
    let holds = gbach(&["check", f]);
    assert_eq!(holds.status.code(), Some(0));
    assert_eq!(field(&stdout(&holds), "witness_len"), Some("8"));
    let refuted = gbach(&["check", f, "--formula", "overflow"]);
    assert_eq!(refuted.status.code(), Some(1));
    assert_eq!(field(&stdout(&refuted), "bound"), Some("complete"));
    let inline = gbach(&["check", f, "--formula", "Reach(#slot = 2 & #done = 3)"]);
    assert_eq!(inline.status.code(), Some(0));
    let limited = gbach(&["check", f, "--max-states", "3"]);
    assert_eq!(limited.status.code(), Some(3));
    assert_eq!(field(&stdout(&limited), "bound"), Some("max_states"));
}

#[test]
fn max_states_comes_from_the_environment() {
    let f = program("producer_consumer.gbach");
    let o = Command::new(env!("CARGO_BIN_EXE_gbach"))
        .args(["check", f.to_str().unwrap(), "--format", "structured"])
        .env("GBACH_MAX_STATES", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "states_expanded"), Some("3"));
    // the flag wins over the variable
    let o = Command::new(env!("CARGO_BIN_EXE_gbach"))
        .args(["check", f.to_str().unwrap(), "--max-states", "1000"])
        .env("GBACH_MAX_STATES", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_gbach"))
        .args(["check", f.to_str().unwrap()])
        .env("GBACH_MAX_STATES", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn witness_file_replays() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.trace");
    let f = program("rush_hour_case1_gl.gbach");
    let o = gbach(&["check", f.to_str().unwrap(), "--witness", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let trace = Trace::from_text(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(trace.len(), 7);
    replay(&trace, &generate_rush_hour(1, Variant::GL).unwrap()).unwrap();
}

#[test]
fn run_is_reproducible() {
    let f = program("producer_consumer.gbach");
    let a = gbach(&["run", f.to_str().unwrap(), "--seed", "9"]);
    let b = gbach(&["run", f.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(field(&stdout(&a), "final").is_some());
}

#[test]
fn transform_matches_the_guarded_variant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.gbach");
    let f = program("rush_hour_case1_nogl.gbach");
    let o = gbach(&["transform", f.to_str().unwrap(), "--formula", "goal", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = String::from_utf8(o.stderr).unwrap();
    assert_eq!(report.matches("action=transformed").count(), 9, "{report}");
    let got = parse_program(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(got, generate_rush_hour(1, Variant::GL).unwrap());

    let dry = gbach(&["transform", f.to_str().unwrap(), "--formula", "goal", "--dry-run"]);
    assert_eq!(stdout(&dry), report);
}

#[test]
fn transform_without_chains_echoes_the_input() {
    let f = program("no_chains.gbach");
    let o = gbach(&["transform", f.to_str().unwrap(), "--formula", "#a = 1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout, std::fs::read(&f).unwrap());
}

#[test]
fn transform_skips_and_forces() {
    let f = program("overlapping_tail.gbach");
    let plain = gbach(&["transform", f.to_str().unwrap(), "--formula", "goal", "--dry-run"]);
    let r = stdout(&plain);
    assert_eq!(r.matches("action=skipped").count(), 1, "{r}");
    assert_eq!(r.matches("action=transformed").count(), 1, "{r}");
    let forced = gbach(&["transform", f.to_str().unwrap(), "--formula", "goal", "--dry-run", "--force"]);
    let r = stdout(&forced);
    assert_eq!(r.matches("action=forced").count(), 1, "{r}");
    assert!(!r.contains("action=skipped"), "{r}");
}

#[test]
fn bench_exports_replayable_traces() {
    let dir = tempfile::tempdir().unwrap();
    let o = gbach(&[
        "bench",
        "--cases",
        "1,2",
        "--repeats",
        "1",
        "--format",
        "structured",
        "--export-traces",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.matches("verdict: holds").count(), 4, "{out}");
    for case in [1, 2] {
        for v in [Variant::GL, Variant::NoGL] {
            let text = std::fs::read_to_string(dir.path().join(format!("case{case}_{v}.trace"))).unwrap();
            let trace = Trace::from_text(&text).unwrap();
            replay(&trace, &generate_rush_hour(case, v).unwrap()).unwrap();
        }
    }
}

#[test]
fn bench_rejects_unknown_cases() {
    let o = gbach(&["bench", "--cases", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gbach(&["bench", "--cases", "1", "--variant", "GL", "--repeats", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("NoGL"));
}

#[test]
fn usage_errors() {
    assert_eq!(gbach(&[]).status.code(), Some(2));
    assert_eq!(gbach(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gbach(&["--help"]).status.code(), Some(0));
    assert_eq!(gbach(&["check", "/nonexistent.gbach"]).status.code(), Some(2));
}
