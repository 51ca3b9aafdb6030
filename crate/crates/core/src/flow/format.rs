//! `arcflow <edge-id> <+|-> <letters...>` lines; `+` is the arc from the
//! edge's first endpoint to its second. Omitted arcs carry the empty word.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Flow, Letter, Word};
use crate::plane_graph::{Dart, PlaneGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub fn parse_flow(text: &str, g: &PlaneGraph) -> Result<Flow, FlowParseError> {
    let mut flow = Flow::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| FlowParseError::Syntax { line, message };
        let tok: Vec<&str> = raw
            .split('#')
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        if tok.is_empty() {
            continue;
        }
        if tok[0] != "arcflow" || tok.len() < 3 {
            return Err(err("expected `arcflow <edge-id> <+|-> <letters...>`".into()));
        }
        let e: usize = tok[1]
            .parse()
            .map_err(|_| err(format!("bad edge id `{}`", tok[1])))?;
        if e == 0 || e > g.edge_count() {
            return Err(err(format!("edge {e} out of range 1..={}", g.edge_count())));
        }
        let end = match tok[2] {
            "+" => 0,
            "-" => 1,
            other => return Err(err(format!("expected + or -, found `{other}`"))),
        };
        let letters = tok[3..]
            .iter()
            .map(|t| match t.parse::<Letter>() {
                Ok(0) | Err(_) => Err(err(format!("bad letter `{t}`"))),
                Ok(l) => Ok(l),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let arc = Dart::new(e - 1, end);
        flow.set(arc, flow.word(arc).concat(&Word::reduce(letters)));
    }
    Ok(flow)
}

pub fn serialize_flow(flow: &Flow) -> String {
    let mut out = String::new();
    for (d, w) in flow.support() {
        write!(
            out,
            "arcflow {} {}",
            d.edge() + 1,
            if d.end() == 0 { '+' } else { '-' }
        )
        .unwrap();
        for l in w.letters() {
            write!(out, " {l}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::PlaneGraph;

    #[test]
    fn round_trip() {
        let g = PlaneGraph::build(3, &[(0, 1), (1, 2)], None, None).unwrap();
        let text = "# flow\narcflow 1 + 1 2 -2\narcflow 2 - -1\n";
        let flow = parse_flow(text, &g).unwrap();
        assert_eq!(flow.word(Dart::new(0, 0)), Word::letter(1));
        assert_eq!(flow.word(Dart::new(1, 1)), Word::letter(-1));
        assert_eq!(serialize_flow(&flow), "arcflow 1 + 1\narcflow 2 - -1\n");
        assert_eq!(parse_flow(&serialize_flow(&flow), &g).unwrap(), flow);
    }

    #[test]
    fn errors() {
        let g = PlaneGraph::build(2, &[(0, 1)], None, None).unwrap();
        for bad in [
            "arcflow 2 + 1",
            "arcflow 1 * 1",
            "arcflow 1 + 0",
            "flow 1 + 1",
            "arcflow 1",
        ] {
            assert!(parse_flow(bad, &g).is_err(), "{bad}");
        }
    }
}
