use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdp"))
        .args(args)
        .output()
        .expect("failed to launch pdp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("pdp-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

/// The 2x2 grid is the 4-cycle 1-2-4-3; `pairs` uses its vertex ids.
fn square(dir: &Scratch, name: &str, pairs: &str) -> String {
    let out = dir.path(name);
    let gen = pdp(&[
        "gen", "grid", "--rows", "2", "--cols", "2", "--pairs", pairs, "--out", &out,
    ]);
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
    out
}

#[test]
fn solve_opposite_corners_prints_a_path() {
    let dir = Scratch::new("solve");
    let inst = square(&dir, "a.pdp", "1,4");
    let out = pdp(&["solve", "--input", &inst]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let path = text
        .lines()
        .find(|l| l.starts_with("path 1 "))
        .expect("no path line");
    let verts: Vec<&str> = path.split_whitespace().skip(2).collect();
    assert_eq!(verts.len(), 3);
    assert_eq!((verts[0], verts[2]), ("1", "4"));
}

#[test]
fn crossing_pairs_are_unsolvable() {
    let dir = Scratch::new("unsolvable");
    let inst = square(&dir, "b.pdp", "1,4;2,3");
    for method in ["auto", "dp", "oracle"] {
        let out = pdp(&["solve", "--input", &inst, "--method", method]);
        assert_eq!(code(&out), 1, "method {method}");
    }
}

#[test]
fn solve_json_is_parseable() {
    let dir = Scratch::new("json");
    let inst = square(&dir, "a.pdp", "1,4");
    let out = pdp(&["solve", "--input", &inst, "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["answer"], "solvable");
    let path = v["solution"]["paths"][0].as_array().unwrap();
    assert_eq!(path.first().unwrap(), 1);
    assert_eq!(path.last().unwrap(), 4);
}

#[test]
fn solve_output_verifies() {
    let dir = Scratch::new("verify");
    let inst = square(&dir, "a.pdp", "1,4");
    let solved = pdp(&["solve", "--input", &inst]);
    let good = dir.write("good.sol", &stdout(&solved));
    assert_eq!(
        code(&pdp(&["verify", "--input", &inst, "--solution", &good])),
        0
    );

    let bad = dir.write("bad.sol", "path 1 1 4\n");
    let out = pdp(&["verify", "--input", &inst, "--solution", &bad]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("from 1 to 4"), "{}", stdout(&out));
}

#[test]
fn hom_test_exit_codes() {
    let dir = Scratch::new("hom");
    let inst = square(&dir, "a.pdp", "1,4");
    // the flow of path 1-2-4 and of path 1-3-4
    let upper = dir.write("upper.flow", "arcflow 1 + 1\narcflow 3 + 1\n");
    let lower = dir.write("lower.flow", "arcflow 2 + 1\narcflow 4 + 1\n");
    let dangling = dir.write("dangling.flow", "arcflow 1 + 1\n");

    let same = pdp(&[
        "hom-test", "--input", &inst, "--flow", &upper, "--flow", &upper,
    ]);
    assert_eq!(code(&same), 0);
    let text = stdout(&same);
    let labels: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("face") || l.starts_with("digon"))
        .collect();
    assert!(!labels.is_empty());
    assert!(labels.iter().all(|l| l.ends_with("[]")), "{text}");

    let swept = pdp(&[
        "hom-test", "--input", &inst, "--flow", &upper, "--flow", &lower,
    ]);
    assert_eq!(code(&swept), 0);

    let invalid = pdp(&[
        "hom-test", "--input", &inst, "--flow", &upper, "--flow", &dangling,
    ]);
    assert_eq!(code(&invalid), 2);
}

#[test]
fn analyze_reports_safe_bound() {
    let dir = Scratch::new("analyze");
    let inst = square(&dir, "a.pdp", "1,4");
    let out = pdp(&["analyze", "--input", &inst, "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["safe_bound"], pdp_core::reduction::safe_bound(1), "{v}");
}

#[test]
fn gen_is_deterministic() {
    let a = pdp(&["gen", "random", "--n", "12", "--k", "2", "--seed", "7"]);
    let b = pdp(&["gen", "random", "--n", "12", "--k", "2", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let onion = pdp(&["gen", "onion", "--rings", "3", "--k", "1", "--seed", "1"]);
    assert_eq!(code(&onion), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&pdp(&["frobnicate"])), 2);
    assert_eq!(code(&pdp(&["solve"])), 2);
    let dir = Scratch::new("usage");
    let inst = square(&dir, "a.pdp", "1,4");
    let out = pdp(&["solve", "--input", &inst, "--method", "bogus"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    assert_eq!(
        code(&pdp(&["solve", "--input", &inst, "--set", "no.such=1"])),
        2
    );
    assert_eq!(
        code(&pdp(&["solve", "--input", &dir.path("missing.pdp")])),
        2
    );
}

#[test]
fn bench_on_shipped_corpus_agrees() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/corpus");
    let out = pdp(&["bench", "--corpus", corpus.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("agreement:"))
        .expect("no agreement line");
    assert!(line.ends_with("(100.0%)"), "{line}");
}
