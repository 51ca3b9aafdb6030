//! Line-based text format.
//!
//! ```text
//! p pdp <n> <m> <k>
//! e <edge-id> <u> <v>
//! rot <v> <edge-id>...        (optional, all or none)
//! t <i> <s_i> <t_i>
//! outer <edge-id> <L|R>       (optional)
//! ```
//!
//! Vertices, edges and pairs are 1-indexed in text and 0-indexed in memory.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Instance, InstanceError, Solution};
use crate::plane_graph::{Dart, PlaneGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Validation(String),
}

impl From<InstanceError> for ParseError {
    fn from(e: InstanceError) -> Self {
        ParseError::Validation(e.to_string())
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn invalid(message: impl Into<String>) -> ParseError {
    ParseError::Validation(message.into())
}

/// Meaningful lines with their 1-based numbers, comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn number(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

/// 1-based id in `1..=max`, returned 0-based.
fn index(line: usize, tok: &str, max: usize, what: &str) -> Result<usize, ParseError> {
    let v = number(line, tok, what)?;
    if v == 0 || v > max {
        return Err(invalid(format!(
            "line {line}: {what} {v} out of range 1..={max}"
        )));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or_else(|| syntax(0, "empty input"))?;
    if header.len() != 5 || header[0] != "p" || header[1] != "pdp" {
        return Err(syntax(hline, "expected header `p pdp <n> <m> <k>`"));
    }
    let n = number(hline, header[2], "vertex count")?;
    let m = number(hline, header[3], "edge count")?;
    let k = number(hline, header[4], "pair count")?;

    let mut edges: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut rot: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut pairs: Vec<Option<(usize, usize)>> = vec![None; k];
    let mut outer: Option<(usize, char, usize)> = None;

    for (line, tok) in it {
        match tok[0] {
            "e" => {
                if tok.len() != 4 {
                    return Err(syntax(line, "expected `e <edge-id> <u> <v>`"));
                }
                let id = index(line, tok[1], m, "edge id")?;
                let u = index(line, tok[2], n, "vertex")?;
                let v = index(line, tok[3], n, "vertex")?;
                if edges[id].replace((u, v)).is_some() {
                    return Err(invalid(format!(
                        "line {line}: edge {} defined twice",
                        id + 1
                    )));
                }
            }
            "rot" => {
                if tok.len() < 2 {
                    return Err(syntax(line, "expected `rot <v> <edge-id>...`"));
                }
                let v = index(line, tok[1], n, "vertex")?;
                let list = tok[2..]
                    .iter()
                    .map(|t| index(line, t, m, "edge id"))
                    .collect::<Result<Vec<_>, _>>()?;
                if rot[v].replace(list).is_some() {
                    return Err(invalid(format!(
                        "line {line}: rotation of vertex {} given twice",
                        v + 1
                    )));
                }
            }
            "t" => {
                if tok.len() != 4 {
                    return Err(syntax(line, "expected `t <i> <s> <t>`"));
                }
                let i = index(line, tok[1], k, "pair index")?;
                let s = index(line, tok[2], n, "vertex")?;
                let t = index(line, tok[3], n, "vertex")?;
                if pairs[i].replace((s, t)).is_some() {
                    return Err(invalid(format!("line {line}: pair {} given twice", i + 1)));
                }
            }
            "outer" => {
                if tok.len() != 3 {
                    return Err(syntax(line, "expected `outer <edge-id> <L|R>`"));
                }
                let e = index(line, tok[1], m, "edge id")?;
                let side = match tok[2] {
                    "L" => 'L',
                    "R" => 'R',
                    other => return Err(syntax(line, format!("expected L or R, found `{other}`"))),
                };
                if outer.replace((e, side, line)).is_some() {
                    return Err(invalid(format!("line {line}: outer face given twice")));
                }
            }
            "p" => return Err(syntax(line, "duplicate header")),
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let edges: Vec<(usize, usize)> = edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| invalid(format!("edge {} missing", i + 1))))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(usize, usize)> = pairs
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| invalid(format!("pair {} missing", i + 1))))
        .collect::<Result<_, _>>()?;

    let rotations = if rot.iter().any(Option::is_some) {
        let mut out = Vec::with_capacity(n);
        for (v, list) in rot.into_iter().enumerate() {
            let mut darts = Vec::new();
            let mut loop_seen = std::collections::HashSet::new();
            for e in list.unwrap_or_default() {
                let (a, b) = edges[e];
                let end = if a == b {
                    if loop_seen.insert(e) {
                        0
                    } else {
                        1
                    }
                } else if a == v {
                    0
                } else if b == v {
                    1
                } else {
                    return Err(invalid(format!(
                        "rotation of vertex {} lists non-incident edge {}",
                        v + 1,
                        e + 1
                    )));
                };
                darts.push(Dart::new(e, end));
            }
            out.push(darts);
        }
        Some(out)
    } else {
        None
    };
    let outer = outer.map(|(e, side, _)| Dart::new(e, if side == 'L' { 0 } else { 1 }));
    let graph = PlaneGraph::build(n, &edges, rotations, outer).map_err(InstanceError::from)?;
    Ok(Instance::new(graph, pairs)?)
}

/// Canonical text: header, edges by id, rotations by vertex, pairs by index,
/// then the outer-face designation.
pub fn serialize_instance(instance: &Instance) -> String {
    let g = &instance.graph;
    let mut out = String::new();
    writeln!(
        out,
        "p pdp {} {} {}",
        g.vertex_count(),
        g.edge_count(),
        instance.k()
    )
    .unwrap();
    for (e, [u, v]) in g.edges().iter().enumerate() {
        writeln!(out, "e {} {} {}", e + 1, u + 1, v + 1).unwrap();
    }
    for v in 0..g.vertex_count() {
        let rot = g.rotation(v);
        if rot.is_empty() {
            continue;
        }
        write!(out, "rot {}", v + 1).unwrap();
        for d in rot {
            write!(out, " {}", d.edge() + 1).unwrap();
        }
        out.push('\n');
    }
    for (i, (s, t)) in instance.pairs().iter().enumerate() {
        writeln!(out, "t {} {} {}", i + 1, s + 1, t + 1).unwrap();
    }
    if let Some(d) = g.outer_dart() {
        writeln!(
            out,
            "outer {} {}",
            d.edge() + 1,
            if d.is_forward() { 'L' } else { 'R' }
        )
        .unwrap();
    }
    out
}

/// Parses `path <i> <v1> <v2> ...` lines.
pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    let mut paths: Vec<Option<Vec<usize>>> = Vec::new();
    for (line, tok) in lines(text) {
        if tok[0] != "path" || tok.len() < 2 {
            return Err(syntax(line, "expected `path <i> <v1> <v2> ...`"));
        }
        let i = number(line, tok[1], "path index")?;
        if i == 0 {
            return Err(syntax(line, "path indices start at 1"));
        }
        let verts = tok[2..]
            .iter()
            .map(|t| {
                number(line, t, "vertex")
                    .and_then(|v| v.checked_sub(1).ok_or_else(|| syntax(line, "vertex 0")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if paths.len() < i {
            paths.resize(i, None);
        }
        if paths[i - 1].replace(verts).is_some() {
            return Err(syntax(line, format!("path {i} given twice")));
        }
    }
    let paths = paths
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| invalid(format!("path {} missing", i + 1))))
        .collect::<Result<_, _>>()?;
    Ok(Solution { paths })
}

pub fn serialize_solution(solution: &Solution) -> String {
    let mut out = String::new();
    for (i, path) in solution.paths.iter().enumerate() {
        write!(out, "path {}", i + 1).unwrap();
        for v in path {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_grid, gen_random_planar};
    use proptest::prelude::*;

    const C4: &str = "# four-cycle\np pdp 4 4 1\ne 1 1 2\ne 2 2 3\ne 3 3 4\ne 4 4 1\nt 1 1 3\n";

    #[test]
    fn parses_four_cycle() {
        let inst = parse_instance(C4).unwrap();
        assert_eq!(inst.k(), 1);
        assert_eq!(inst.pairs(), &[(0, 2)]);
        assert_eq!(inst.graph.face_count(), 2);
    }

    #[test]
    fn coinciding_terminals_rejected() {
        let text = "p pdp 4 4 2\ne 1 1 2\ne 2 2 3\ne 3 3 4\ne 4 4 1\nt 1 1 3\nt 2 2 1\n";
        assert!(matches!(
            parse_instance(text),
            Err(ParseError::Validation(_))
        ));
    }

    #[test]
    fn syntax_and_range_errors() {
        assert!(matches!(parse_instance(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_instance("p pdp 2 1 0\ne 1 1 x\n"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_instance("p pdp 2 1 0\ne 1 1 3\n"),
            Err(ParseError::Validation(_))
        ));
        assert!(matches!(
            parse_instance("p pdp 2 1 0\n"),
            Err(ParseError::Validation(_))
        ));
        assert!(matches!(
            parse_instance("p pdp 2 1 0\ne 1 1 2\nfoo\n"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_instance("p pdp 2 1 0\ne 1 1 2\nouter 1 X\n"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn nonplanar_rejected() {
        let mut text = String::from("p pdp 5 10 0\n");
        let mut id = 1;
        for i in 1..=5 {
            for j in i + 1..=5 {
                text += &format!("e {id} {i} {j}\n");
                id += 1;
            }
        }
        assert!(matches!(
            parse_instance(&text),
            Err(ParseError::Validation(_))
        ));
    }

    #[test]
    fn partial_rotation_rejected() {
        let text = "p pdp 3 2 0\ne 1 1 2\ne 2 2 3\nrot 1 1\nrot 2 1 2\n";
        assert!(matches!(
            parse_instance(text),
            Err(ParseError::Validation(_))
        ));
    }

    #[test]
    fn round_trip_fixed_cases() {
        let empty = parse_instance("p pdp 3 0 1\nt 1 1 3\n").unwrap();
        let grid = gen_grid(3, 3, &[((1, 1), (3, 3))]).unwrap();
        let multi =
            parse_instance("p pdp 3 4 1\ne 1 1 2\ne 2 1 2\ne 3 2 3\ne 4 1 2\nt 1 1 3\n").unwrap();
        for inst in [empty, grid, multi] {
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            assert_eq!(back, inst);
            assert_eq!(serialize_instance(&back), text);
        }
    }

    #[test]
    fn outer_designation_survives() {
        let text = "p pdp 4 4 0\ne 1 1 2\ne 2 2 3\ne 3 3 4\ne 4 4 1\nrot 1 1 4\nrot 2 2 1\nrot 3 3 2\nrot 4 4 3\nouter 1 R\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.graph.outer_face(), inst.graph.face_of(Dart::new(0, 1)));
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn solution_text() {
        let sol = parse_solution("path 1 1 2 3\n# c\npath 2 4 5\n").unwrap();
        assert_eq!(sol.paths, vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(parse_solution(&serialize_solution(&sol)).unwrap(), sol);
        assert!(parse_solution("path 2 1 2\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_instances_round_trip(n in 4usize..30, k in 0usize..3, seed in any::<u64>()) {
            prop_assume!(n >= 2 * k + 2);
            let inst = gen_random_planar(n, k, seed).unwrap();
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(serialize_instance(&back), text);
        }
    }
}
