use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use pdp_core::instance::parse_instance;
use pdp_core::pipeline::{solve, Answer, Config, Method};
use pdp_core::reduction::ReduceMode;

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of `.pdp` instance files.
    #[arg(long)]
    corpus: PathBuf,
    /// Config override `key=value` applied to both runs; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct Row {
    name: String,
    vertices: usize,
    edges: usize,
    pairs: usize,
    width: Option<usize>,
    dp: Option<Answer>,
    oracle: Option<Answer>,
    agree: bool,
    dp_ms: f64,
    oracle_ms: f64,
    /// Set when either run failed.
    error: Option<String>,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    agree: usize,
    errors: usize,
    rows: Vec<Row>,
}

fn bench_one(path: &Path, base: &Config) -> Row {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut row = Row {
        name,
        vertices: 0,
        edges: 0,
        pairs: 0,
        width: None,
        dp: None,
        oracle: None,
        agree: false,
        dp_ms: 0.0,
        oracle_ms: 0.0,
        error: None,
    };
    let inst = match fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| parse_instance(&t).map_err(|e| e.to_string()))
    {
        Ok(inst) => inst,
        Err(e) => {
            row.error = Some(e);
            return row;
        }
    };
    row.vertices = inst.graph.vertex_count();
    row.edges = inst.graph.edge_count();
    row.pairs = inst.k();
    let run = |method| {
        solve(
            &inst,
            &Config {
                method,
                reduce: ReduceMode::Off,
                ..base.clone()
            },
        )
    };
    match (run(Method::Dp), run(Method::Oracle)) {
        (Ok(dp), Ok(oracle)) => {
            row.width = dp.width;
            row.agree = dp.answer == oracle.answer;
            row.dp = Some(dp.answer);
            row.oracle = Some(oracle.answer);
            row.dp_ms = dp.timings.total_ms;
            row.oracle_ms = oracle.timings.total_ms;
        }
        (Err(e), _) => row.error = Some(format!("dp: {e}")),
        (_, Err(e)) => row.error = Some(format!("oracle: {e}")),
    }
    row
}

fn label(a: Option<Answer>) -> &'static str {
    match a {
        Some(Answer::Solvable) => "yes",
        Some(Answer::Unsolvable) => "no",
        None => "-",
    }
}

pub fn run(args: &BenchArgs) -> Result<u8> {
    let mut config = Config::default();
    for s in &args.set {
        config.apply(s)?;
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&args.corpus)
        .with_context(|| format!("cannot read {}", args.corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pdp"))
        .collect();
    files.sort();
    let rows: Vec<Row> = files.par_iter().map(|p| bench_one(p, &config)).collect();
    let summary = Summary {
        total: rows.len(),
        agree: rows.iter().filter(|r| r.agree).count(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        rows,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!(
            "{:<28} {:>4} {:>4} {:>2} {:>5} {:>4} {:>6} {:>5} {:>9} {:>9}",
            "instance", "n", "m", "k", "width", "dp", "oracle", "agree", "dp ms", "oracle ms"
        );
        for r in &summary.rows {
            let width = r.width.map_or("-".to_string(), |w| w.to_string());
            println!(
                "{:<28} {:>4} {:>4} {:>2} {:>5} {:>4} {:>6} {:>5} {:>9.2} {:>9.2}",
                r.name,
                r.vertices,
                r.edges,
                r.pairs,
                width,
                label(r.dp),
                label(r.oracle),
                if r.agree { "ok" } else { "FAIL" },
                r.dp_ms,
                r.oracle_ms
            );
            if let Some(e) = &r.error {
                println!("  error: {e}");
            }
        }
        let pct = if summary.total == 0 {
            100.0
        } else {
            100.0 * summary.agree as f64 / summary.total as f64
        };
        println!("agreement: {}/{} ({pct:.1}%)", summary.agree, summary.total);
    }
    Ok(if summary.errors > 0 {
        2
    } else if summary.agree == summary.total {
        0
    } else {
        1
    })
}
