//! `stree <edge-id>...` for trees and `walk <i> <dart>...` for linkages.
//! Edge ids and walk indices are 1-based; a dart is `+e` or `-e`, with `+`
//! running from the edge's first endpoint to its second.

use std::fmt::Write as _;

use thiserror::Error;

use super::{SteinerTree, WeakLinkage};
use crate::plane_graph::{Dart, PlaneGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinerParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("walk indices must run 1..={expected} without gaps")]
    WalkIndices { expected: usize },
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| {
            (
                i + 1,
                raw.split('#')
                    .next()
                    .unwrap_or("")
                    .split_whitespace()
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, tok)| !tok.is_empty())
}

fn edge_id(tok: &str, g: &PlaneGraph) -> Result<usize, String> {
    match tok.parse::<usize>() {
        Ok(e) if (1..=g.edge_count()).contains(&e) => Ok(e - 1),
        _ => Err(format!("bad edge id `{tok}`")),
    }
}

pub fn parse_tree(text: &str, g: &PlaneGraph) -> Result<SteinerTree, SteinerParseError> {
    let mut tree = SteinerTree::default();
    for (line, tok) in lines(text) {
        let err = |message: String| SteinerParseError::Syntax { line, message };
        if tok[0] != "stree" {
            return Err(err("expected `stree <edge-id>...`".into()));
        }
        for t in &tok[1..] {
            tree.edges.insert(edge_id(t, g).map_err(err)?);
        }
    }
    Ok(tree)
}

pub fn serialize_tree(tree: &SteinerTree) -> String {
    let mut out = String::from("stree");
    for e in &tree.edges {
        write!(out, " {}", e + 1).unwrap();
    }
    out.push('\n');
    out
}

pub fn parse_linkage(text: &str, g: &PlaneGraph) -> Result<WeakLinkage, SteinerParseError> {
    let mut indexed = Vec::new();
    for (line, tok) in lines(text) {
        let err = |message: String| SteinerParseError::Syntax { line, message };
        if tok[0] != "walk" || tok.len() < 2 {
            return Err(err("expected `walk <i> <dart>...`".into()));
        }
        let i: usize = tok[1]
            .parse()
            .map_err(|_| err(format!("bad walk index `{}`", tok[1])))?;
        let darts = tok[2..]
            .iter()
            .map(|t| {
                let (end, rest) = match t.as_bytes().first() {
                    Some(b'+') => (0, &t[1..]),
                    Some(b'-') => (1, &t[1..]),
                    _ => return Err(err(format!("dart `{t}` needs a + or - sign"))),
                };
                Ok(Dart::new(edge_id(rest, g).map_err(err)?, end))
            })
            .collect::<Result<Vec<_>, _>>()?;
        indexed.push((i, darts));
    }
    indexed.sort_by_key(|(i, _)| *i);
    if indexed
        .iter()
        .enumerate()
        .any(|(pos, (i, _))| *i != pos + 1)
    {
        return Err(SteinerParseError::WalkIndices {
            expected: indexed.len(),
        });
    }
    Ok(WeakLinkage::new(
        indexed.into_iter().map(|(_, d)| d).collect(),
    ))
}

pub fn serialize_linkage(w: &WeakLinkage) -> String {
    let mut out = String::new();
    for (i, walk) in w.walks.iter().enumerate() {
        write!(out, "walk {}", i + 1).unwrap();
        for d in walk {
            write!(
                out,
                " {}{}",
                if d.is_forward() { '+' } else { '-' },
                d.edge() + 1
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}
