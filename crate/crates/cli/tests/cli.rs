//! End-to-end CLI behavior: generation determinism, the run pipeline with
//! oracle diffing, fault injection, and the exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_congest-apsp"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("congest-apsp-test-{}-{name}", std::process::id()));
    p
}

fn write_triangle() -> PathBuf {
    let path = tmp("g3.txt");
    std::fs::write(&path, "3 6\n0 1 2\n0 2 6\n1 0 1\n1 2 3\n2 0 1\n2 1 1\n").unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "expected success: {:?}\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = run_ok(&["gen", "--spec", "random", "--n", "32", "--weights", "1..1024", "--seed", "7"]);
    let b = run_ok(&["gen", "--spec", "random", "--n", "32", "--weights", "1..1024", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout, "same seed must give byte-identical files");
    let c = run_ok(&["gen", "--spec", "random", "--n", "32", "--weights", "1..1024", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_shapes() {
    let out = run_ok(&["gen", "--spec", "path", "--n", "4", "--weights", "1..1", "--seed", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("4 6"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(" 1")));

    let out = run_ok(&["gen", "--spec", "star", "--n", "16", "--weights", "1..4", "--seed", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // Every link touches the hub.
    for line in text.lines().skip(1) {
        let mut it = line.split_whitespace();
        let u: usize = it.next().unwrap().parse().unwrap();
        let v: usize = it.next().unwrap().parse().unwrap();
        assert!(u == 0 || v == 0);
    }

    let out = bin().args(["gen", "--spec", "hypercube", "--n", "8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "unknown shape is a usage error");
    let out = bin().args(["gen", "--spec", "grid", "--n", "12"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "non-square grid rejected");
}

#[test]
fn run_apsp_with_oracle_check() {
    let g = write_triangle();
    let stats = tmp("stats.json");
    run_ok(&[
        "run", "--graph", g.to_str().unwrap(), "--check-oracle",
        "--stats-out", stats.to_str().unwrap(),
    ]);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["ok"], true);
    assert_eq!(doc["verify"]["ok"], true);
    assert_eq!(doc["oracle_check"]["ok"], true);
    assert!(doc["stats"]["totals"]["rounds"].as_u64().unwrap() > 0);
}

#[test]
fn stats_json_is_byte_stable() {
    let g = write_triangle();
    let run = || {
        let s = tmp("stable.json");
        run_ok(&[
            "run", "--graph", g.to_str().unwrap(), "--seed", "5",
            "--stats-out", s.to_str().unwrap(),
        ]);
        std::fs::read(&s).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn fault_injection_names_the_pair() {
    let g = write_triangle();
    let stats = tmp("fault.json");
    let out = bin()
        .args([
            "run", "--graph", g.to_str().unwrap(), "--inject-fault", "inflate:0:2",
            "--stats-out", stats.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["ok"], false);
    let witnesses = doc["verify"]["witnesses"].as_array().unwrap();
    assert!(witnesses.iter().any(|w| w[0] == 0 && w[1] == 2), "witnesses: {witnesses:?}");

    let out = bin()
        .args(["run", "--graph", g.to_str().unwrap(), "--inject-fault", "deflate:0:2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn kssp_single_source_csv() {
    let g = write_triangle();
    let csv = tmp("row.csv");
    run_ok(&[
        "run", "--graph", g.to_str().unwrap(), "--mode", "kssp", "--k", "1", "--sources", "0",
        "--emit-distances", csv.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "0,2,5\n");
}

#[test]
fn phase_bench_emits_budgets() {
    let g = write_triangle();
    let stats = tmp("bench.json");
    run_ok(&[
        "run", "--graph", g.to_str().unwrap(), "--mode", "phase-bench",
        "--stats-out", stats.to_str().unwrap(),
    ]);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert!(doc["budgets"]["short_range"]["rounds"].is_number());
}

#[test]
fn io_errors_exit_two() {
    let out = bin().args(["run", "--graph", "/nonexistent/graph.txt"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let bad = tmp("bad.txt");
    std::fs::write(&bad, "2 2\n0 1 1\n").unwrap();
    let out = bin().args(["run", "--graph", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let g = write_triangle();
    let out = bin().args(["run", "--graph", g.to_str().unwrap(), "--mode", "kssp"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "kssp without sources is a usage error");
}

#[test]
fn roundtrip_through_gen_and_parse() {
    let file = tmp("rt.txt");
    run_ok(&[
        "gen", "--spec", "grid", "--n", "16", "--weights", "2..9", "--seed", "3",
        "--out", file.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&file).unwrap();
    let g = graph_core::format::parse(&text, graph_core::ValidateOptions::default()).unwrap();
    assert_eq!(graph_core::format::serialize(&g), text);
    run_ok(&["run", "--graph", file.to_str().unwrap(), "--check-oracle"]);
}
