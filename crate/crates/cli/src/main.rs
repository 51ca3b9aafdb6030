//! `pdp`: solve, verify, generate and inspect planar disjoint paths instances.
//!
//! Exit codes: `solve` 0 solvable / 1 unsolvable, `verify` 0 valid / 1
//! invalid, `hom-test` 0 homologous / 1 not, `bench` 0 full agreement / 1
//! some disagreement. Usage errors, bad input and exhausted limits exit 2.

mod bench;

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pdp_core::flow::{are_homologous, flow_violation, parse_flow, Flow};
use pdp_core::instance::{
    gen_grid, gen_onion, gen_random_planar, parse_instance, parse_solution, serialize_instance,
    serialize_solution, verify_solution, CellPair, Instance, Solution,
};
use pdp_core::pipeline::{solve, Answer, Config, Method, SolveReport};
use pdp_core::reduction::{find_irrelevant_vertex, safe_bound, ReduceMode};
use pdp_core::treewidth::{decompose, Strategy, EXACT_VERTEX_CAP};

#[derive(Parser)]
#[command(
    name = "pdp",
    version,
    about = "Exact solvers for vertex-disjoint paths in plane graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and print a solution if one exists.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Write a generated instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Print structural facts about an instance.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two flows are homologous.
    HomTest {
        #[arg(long)]
        input: PathBuf,
        /// Exactly two flow files.
        #[arg(long = "flow", num_args = 1, required = true)]
        flows: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Compare the DP with the brute-force search on every instance of a corpus.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "auto")]
    method: Method,
    /// `safe`, `off` or `unsafe:<n>`.
    #[arg(long)]
    reduce: Option<ReduceMode>,
    /// Config override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Grid with pairs given as 1-indexed row-major vertex ids, e.g. "1,9;3,7".
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value = "")]
        pairs: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thinned random triangulation with random pairs.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nested rings around a centre with pendant terminals outside.
    Onion {
        #[arg(long)]
        rings: usize,
        #[arg(long, default_value_t = 4)]
        ring_len: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("cannot parse {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(value)?) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Shifts vertex ids to the 1-based numbering used by the file formats.
fn one_based(report: &SolveReport) -> SolveReport {
    let mut r = report.clone();
    if let Some(sol) = &mut r.solution {
        sol.paths.iter_mut().flatten().for_each(|v| *v += 1);
    }
    r.reduction.removed.iter_mut().for_each(|v| *v += 1);
    r
}

fn run_solve(args: &SolveArgs) -> Result<u8> {
    let inst = load_instance(&args.input)?;
    let mut config = Config {
        method: args.method,
        ..Config::default()
    };
    if let Some(mode) = args.reduce {
        config.reduce = mode;
    }
    for s in &args.set {
        config.apply(s)?;
    }
    let report = solve(&inst, &config)?;
    if args.json {
        print_json(&one_based(&report))?;
    } else {
        // header lines are comments so the output doubles as a solution file
        let answer = match report.answer {
            Answer::Solvable => "solvable",
            Answer::Unsolvable => "unsolvable",
        };
        println!("# answer: {answer}");
        println!("# method: {}", report.method);
        if let Some(w) = report.width {
            println!("# width: {w}");
        }
        if !report.reduction.removed.is_empty() {
            println!(
                "# reduction removed {} vertices",
                report.reduction.removed.len()
            );
        }
        if let Some(why) = &report.fallback {
            println!("# fallback: {why}");
        }
        if let Some(sol) = &report.solution {
            print!("{}", serialize_solution(sol));
        }
    }
    Ok(if report.answer == Answer::Solvable {
        0
    } else {
        1
    })
}

fn run_verify(input: &Path, solution: &Path) -> Result<u8> {
    let inst = load_instance(input)?;
    let sol: Solution = parse_solution(&read(solution)?)
        .with_context(|| format!("cannot parse {}", solution.display()))?;
    match verify_solution(&inst, &sol) {
        Ok(()) => {
            println!("valid");
            Ok(0)
        }
        Err(e) => {
            println!("invalid: {}", e.one_based());
            Ok(1)
        }
    }
}

fn parse_pairs(spec: &str, rows: usize, cols: usize) -> Result<Vec<CellPair>> {
    let cell = |tok: &str| -> Result<(usize, usize)> {
        let id: usize = tok
            .trim()
            .parse()
            .with_context(|| format!("bad vertex id `{tok}`"))?;
        if id == 0 || id > rows * cols {
            bail!("vertex {id} is outside the {rows}x{cols} grid");
        }
        Ok(((id - 1) / cols + 1, (id - 1) % cols + 1))
    };
    spec.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(',')
                .with_context(|| format!("pair `{p}` must be `a,b`"))?;
            Ok((cell(a)?, cell(b)?))
        })
        .collect()
}

fn run_gen(cmd: &GenCommand) -> Result<u8> {
    let (inst, out) = match cmd {
        GenCommand::Grid {
            rows,
            cols,
            pairs,
            out,
        } => (
            gen_grid(*rows, *cols, &parse_pairs(pairs, *rows, *cols)?)?,
            out,
        ),
        GenCommand::Random { n, k, seed, out } => (gen_random_planar(*n, *k, *seed)?, out),
        GenCommand::Onion {
            rings,
            ring_len,
            k,
            seed,
            out,
        } => (gen_onion(*rings, *ring_len, *k, *seed)?, out),
    };
    emit(&serialize_instance(&inst), out.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct Analysis {
    vertices: usize,
    edges: usize,
    faces: usize,
    components: usize,
    outer_face_length: usize,
    planar: bool,
    pairs: usize,
    width_min_fill: usize,
    width_min_degree: usize,
    /// Only computed up to the exact solver's vertex cap.
    treewidth_exact: Option<usize>,
    safe_bound: Option<u64>,
    safe_irrelevant_vertex: Option<usize>,
}

fn run_analyze(input: &Path, json: bool) -> Result<u8> {
    let inst = load_instance(input)?;
    let g = &inst.graph;
    let width = |s| decompose(g, s).map(|td| td.width());
    let a = Analysis {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        faces: g.face_count(),
        components: g.component_count(),
        outer_face_length: g.face(g.outer_face()).len(),
        planar: g.check_invariants().is_ok(),
        pairs: inst.k(),
        width_min_fill: width(Strategy::MinFill)?,
        width_min_degree: width(Strategy::MinDegree)?,
        treewidth_exact: (g.vertex_count() <= EXACT_VERTEX_CAP)
            .then(|| width(Strategy::ExactSmall))
            .transpose()?,
        safe_bound: (inst.k() >= 1).then(|| safe_bound(inst.k())),
        safe_irrelevant_vertex: (inst.k() >= 1)
            .then(|| {
                find_irrelevant_vertex(
                    &inst,
                    usize::try_from(safe_bound(inst.k())).unwrap_or(usize::MAX),
                )
            })
            .flatten()
            .map(|v| v + 1),
    };
    if json {
        print_json(&a)?;
    } else {
        println!(
            "planar: {}",
            if a.planar {
                "yes (embedding is consistent)"
            } else {
                "no"
            }
        );
        println!(
            "vertices: {}  edges: {}  faces: {}  components: {}",
            a.vertices, a.edges, a.faces, a.components
        );
        println!("outer face length: {}", a.outer_face_length);
        println!("pairs: {}", a.pairs);
        println!("width (min-fill): {}", a.width_min_fill);
        println!("width (min-degree): {}", a.width_min_degree);
        match a.treewidth_exact {
            Some(tw) => println!("treewidth (exact): {tw}"),
            None => println!("treewidth (exact): skipped above {EXACT_VERTEX_CAP} vertices"),
        }
        if let Some(b) = a.safe_bound {
            println!("safe irrelevance bound: {b} nested cycles");
            match a.safe_irrelevant_vertex {
                Some(v) => println!("irrelevant vertex: {v}"),
                None => println!("irrelevant vertex: none"),
            }
        }
    }
    Ok(0)
}

fn load_flow(inst: &Instance, path: &Path) -> Result<Flow, String> {
    let text = read(path).map_err(|e| format!("{e:#}"))?;
    let flow = parse_flow(&text, &inst.graph).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some((v, trace)) = flow_violation(inst, &flow) {
        return Err(format!(
            "{}: not a flow, vertex {} has trace {trace}",
            path.display(),
            v + 1
        ));
    }
    Ok(flow)
}

fn run_hom_test(input: &Path, flows: &[PathBuf], json: bool) -> Result<u8> {
    let [a, b] = flows else {
        bail!(
            "hom-test takes exactly two --flow files, got {}",
            flows.len()
        )
    };
    let inst = load_instance(input)?;
    let (phi, psi) = match (load_flow(&inst, a), load_flow(&inst, b)) {
        (Ok(phi), Ok(psi)) => (phi, psi),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("invalid flow: {e}");
            return Ok(2);
        }
    };
    let witness = are_homologous(&inst.graph, &phi, &psi);
    if json {
        #[derive(Serialize)]
        struct Out<'a> {
            homologous: bool,
            witness: Option<&'a pdp_core::flow::FaceLabeling>,
        }
        print_json(&Out {
            homologous: witness.is_some(),
            witness: witness.as_ref(),
        })?;
    } else {
        match &witness {
            Some(h) => {
                println!("homologous");
                for (f, w) in h.faces.iter().enumerate() {
                    println!("face {} {w}", f + 1);
                }
                for (e, w) in h.digons.iter().enumerate() {
                    println!("digon {} {w}", e + 1);
                }
            }
            None => println!("not homologous"),
        }
    }
    Ok(if witness.is_some() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Verify { input, solution } => run_verify(&input, &solution),
        Command::Gen(cmd) => run_gen(&cmd),
        Command::Analyze { input, json } => run_analyze(&input, json),
        Command::HomTest { input, flows, json } => run_hom_test(&input, &flows, json),
        Command::Bench(args) => bench::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
