//! Command-line front end: graph generation, experiment runs with stats
//! emission, oracle diffing, and fault injection against the distributed
//! verification pass.
//!
//! Exit codes: 0 success, 1 verification/exactness failure, 2 usage or IO.

mod gen;

use std::path::PathBuf;
use std::process::ExitCode;

use apsp::driver::{apsp, kssp, verify_distributed, RunConfig, RunReport};
use apsp::ApspError;
use clap::{Args, Parser, Subcommand};
use congest_sim::engine::{EngineConfig, RoundEngine};
use congest_sim::tables::DistanceTables;
use graph_core::{format, NodeId, WeightedDigraph};

#[derive(Parser)]
#[command(name = "congest-apsp", about = "CONGEST-model exact shortest-path experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph file.
    Gen(GenArgs),
    /// Run an experiment on a graph file.
    Run(RunArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Shape: random | path | star | cycle | grid.
    #[arg(long, default_value = "random")]
    spec: String,
    #[arg(long)]
    n: usize,
    /// Weight range "lo..hi" (inclusive).
    #[arg(long, default_value = "1..1")]
    weights: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    /// apsp | kssp | phase-bench.
    #[arg(long, default_value = "apsp")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Source count for kssp (sources default to 0..k).
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated source list for kssp.
    #[arg(long)]
    sources: Option<String>,
    /// Short-range hop budget override.
    #[arg(long)]
    h: Option<u64>,
    /// Center oversampling factor.
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    /// Compare the output against sequential Dijkstra.
    #[arg(long)]
    check_oracle: bool,
    /// Write the distance matrix as CSV (rows = sources, columns = targets).
    #[arg(long)]
    emit_distances: Option<PathBuf>,
    /// Write the stats JSON here instead of stdout.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Corrupt one claimed entry before verification: "inflate:s:t" or
    /// "deflate:s:t".
    #[arg(long)]
    inject_fault: Option<String>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Gen(args) => run_gen(args),
        Command::Run(args) => run_experiment(args),
    }
}

fn run_gen(args: GenArgs) -> ExitCode {
    let Some((lo, hi)) = parse_range(&args.weights) else {
        eprintln!("error: bad weight range {:?}", args.weights);
        return ExitCode::from(2);
    };
    match gen::generate(&args.spec, args.n, lo, hi, args.seed) {
        Ok(g) => {
            let text = gen::to_text(&g);
            match args.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(gen::GenError::BadSpec(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_range(text: &str) -> Option<(u64, u64)> {
    let (lo, hi) = text.split_once("..")?;
    Some((lo.parse().ok()?, hi.parse().ok()?))
}

fn parse_fault(text: &str) -> Option<(bool, NodeId, NodeId)> {
    let mut it = text.split(':');
    let kind = it.next()?;
    let s: NodeId = it.next()?.parse().ok()?;
    let t: NodeId = it.next()?.parse().ok()?;
    match kind {
        "inflate" => Some((true, s, t)),
        "deflate" => Some((false, s, t)),
        _ => None,
    }
}

fn load_graph(path: &PathBuf) -> Result<WeightedDigraph, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    // The weight cap is inferred from the file contents.
    let max_w = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_whitespace().nth(2))
        .filter_map(|w| w.parse::<u64>().ok())
        .max()
        .unwrap_or(1);
    let n_guess = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
        .and_then(|t| t.parse::<usize>().ok())
        .unwrap_or(2);
    format::parse(&text, gen::weight_opts(n_guess, max_w)).map_err(|e| e.to_string())
}

fn run_experiment(args: RunArgs) -> ExitCode {
    let g = match load_graph(&args.graph) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = RunConfig {
        seed: args.seed,
        alpha: args.alpha,
        h_override: args.h,
        ..RunConfig::default()
    };
    let sources: Option<Vec<NodeId>> = match (&args.sources, args.k) {
        (Some(list), _) => {
            let parsed: Result<Vec<NodeId>, _> =
                list.split(',').map(|t| t.trim().parse::<NodeId>()).collect();
            match parsed {
                Ok(v) if !v.is_empty() && v.iter().all(|&s| s < g.n()) => Some(v),
                _ => {
                    eprintln!("error: bad source list {list:?}");
                    return ExitCode::from(2);
                }
            }
        }
        (None, Some(k)) if k >= 1 && k <= g.n() => Some((0..k).collect()),
        (None, Some(k)) => {
            eprintln!("error: bad k = {k}");
            return ExitCode::from(2);
        }
        (None, None) => None,
    };

    let result = match args.mode.as_str() {
        "apsp" | "phase-bench" => apsp(&g, cfg),
        "kssp" => {
            let Some(srcs) = sources.clone() else {
                eprintln!("error: kssp needs --k or --sources");
                return ExitCode::from(2);
            };
            kssp(&g, &srcs, cfg)
        }
        other => {
            eprintln!("error: unknown mode {other:?}");
            return ExitCode::from(2);
        }
    };
    let report = match result {
        Ok(r) => r,
        Err(e @ ApspError::Engine(congest_sim::EngineError::Disconnected(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("failure: {e}");
            return ExitCode::from(1);
        }
    };

    let mut verify_json = serde_json::to_value(report.verify.as_ref().unwrap()).unwrap();
    let mut ok = report.verify.as_ref().map(|v| v.ok).unwrap_or(false);

    if let Some(spec) = &args.inject_fault {
        let Some((inflate, s, t)) = parse_fault(spec) else {
            eprintln!("error: bad fault spec {spec:?}");
            return ExitCode::from(2);
        };
        if s == t || t >= g.n() || !report.sources.contains(&s) {
            eprintln!("error: fault pair ({s},{t}) not an off-diagonal tracked entry");
            return ExitCode::from(2);
        }
        match verify_with_fault(&g, &report, inflate, s, t, args.seed) {
            Ok(rep) => {
                ok = rep.ok;
                verify_json = serde_json::to_value(&rep).unwrap();
            }
            Err(e) => {
                eprintln!("failure: {e}");
                return ExitCode::from(1);
            }
        }
    }

    let oracle_json = if args.check_oracle {
        let truth = oracle::all_pairs(&g, &oracle::base_weights(&g));
        let mut mismatches = Vec::new();
        for (k, &s) in report.sources.iter().enumerate() {
            for t in 0..g.n() {
                if report.distances[k][t] != truth[s][t] {
                    mismatches.push((s, t));
                }
            }
        }
        if !mismatches.is_empty() {
            ok = false;
        }
        serde_json::json!({ "ok": mismatches.is_empty(), "mismatches": mismatches })
    } else {
        serde_json::Value::Null
    };

    if let Some(path) = &args.emit_distances {
        let mut csv = String::new();
        for row in &report.distances {
            let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            csv.push_str(&cells.join(","));
            csv.push('\n');
        }
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }

    let mut doc = serde_json::json!({
        "config": {
            "mode": args.mode,
            "graph": args.graph.display().to_string(),
            "seed": args.seed,
            "alpha": args.alpha,
            "h": report.h,
            "sources": report.sources.len(),
        },
        "stats": report.stats_json(),
        "verify": verify_json,
        "oracle_check": oracle_json,
        "ok": ok,
    });
    if args.mode == "phase-bench" {
        doc["budgets"] = budgets_json(&g, &report);
    }
    let text = serde_json::to_string_pretty(&doc).unwrap();
    match &args.stats_out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{text}"),
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Re-run the verification pass over tables with one corrupted entry.
fn verify_with_fault(
    g: &WeightedDigraph,
    report: &RunReport,
    inflate: bool,
    s: NodeId,
    t: NodeId,
    seed: u64,
) -> Result<apsp::driver::VerifyReport, ApspError> {
    let k = report.sources.iter().position(|&x| x == s).expect("validated upstream");
    let n = g.n();
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|node| (0..report.sources.len()).map(|kk| report.distances[kk][node]).collect())
        .collect();
    if inflate {
        rows[t][k] += 1;
    } else {
        assert!(rows[t][k] > 0, "cannot deflate a zero entry");
        rows[t][k] -= 1;
    }
    let tables = DistanceTables::from_rows("claimed", report.sources.clone(), rows);
    let weights: Vec<u64> = g.arcs().iter().map(|a| a.weight).collect();
    let mut engine = RoundEngine::new(g, EngineConfig { bandwidth_factor: 8, seed });
    let tree = congest_sim::bfs_tree::build_bfs_tree(&mut engine, "bfs-tree")?;
    verify_distributed(&mut engine, &tables, &weights, &tree, "verify")
}

/// Per-phase budget ratios for the bench mode.
fn budgets_json(g: &WeightedDigraph, report: &RunReport) -> serde_json::Value {
    let n = g.n() as f64;
    let log2n = n.log2();
    let h = report.h as f64;
    let r = report.centers.first().map(|c| c.len()).unwrap_or(0) as f64;
    let sr = report.stats.phase("short-range").rounds as f64;
    let rs = report.stats.rounds_with_prefix("rsink-") as f64;
    let bc = report.stats.phase("broadcast").rounds as f64;
    serde_json::json!({
        "short_range": { "rounds": sr, "budget": n * h.sqrt() * log2n * log2n },
        "rsink": { "rounds": rs, "budget": n * r.max(1.0).sqrt() * log2n * log2n },
        "broadcast": { "rounds": bc, "work": report.broadcast_work },
    })
}
