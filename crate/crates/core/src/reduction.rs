//! Irrelevant-vertex reduction: a non-terminal vertex enclosed by enough
//! vertex-disjoint nested cycles, each separating it from every terminal,
//! can be deleted without changing the answer.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{simple_adjacency, Instance, Solution};
use crate::plane_graph::{Dart, PlaneGraph, VertexId};

/// Number of nested separating cycles that makes a vertex provably
/// irrelevant for `k` requests: `ceil(82 * k^(3/2) * 2^k)`, saturating.
pub fn safe_bound(k: usize) -> u64 {
    // exact ceiling of sqrt(82^2 * 4^k * k^3)
    let square = u32::try_from(k)
        .ok()
        .and_then(|k32| 4u128.checked_pow(k32))
        .and_then(|p| p.checked_mul(82 * 82))
        .and_then(|p| p.checked_mul((k as u128).pow(3)));
    let Some(square) = square else {
        return u64::MAX;
    };
    let mut root = (square as f64).sqrt() as u128;
    while root * root > square {
        root -= 1;
    }
    while root * root < square {
        root += 1;
    }
    u64::try_from(root).unwrap_or(u64::MAX)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReduceMode {
    Off,
    /// Requires `safe_bound(k)` nested cycles.
    #[default]
    Safe,
    /// Accepts the given number of cycles. Not answer-preserving in
    /// general; exists to exercise the reduction on small gadgets.
    Unsafe(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("reduce mode must be `off`, `safe` or `unsafe:<n>` with n >= 1, got `{0}`")]
pub struct ReduceModeError(String);

impl FromStr for ReduceMode {
    type Err = ReduceModeError;

    fn from_str(s: &str) -> Result<ReduceMode, ReduceModeError> {
        match s {
            "off" => Ok(ReduceMode::Off),
            "safe" => Ok(ReduceMode::Safe),
            _ => s
                .strip_prefix("unsafe:")
                .and_then(|n| n.parse().ok())
                .filter(|&n| n >= 1)
                .map(ReduceMode::Unsafe)
                .ok_or_else(|| ReduceModeError(s.to_string())),
        }
    }
}

impl fmt::Display for ReduceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReduceMode::Off => write!(f, "off"),
            ReduceMode::Safe => write!(f, "safe"),
            ReduceMode::Unsafe(n) => write!(f, "unsafe:{n}"),
        }
    }
}

/// The cycle bounding the face that absorbs `inner` once it is deleted, if
/// `inner` sits in a single such face and that face is bounded by a simple
/// cycle.
fn enclosing_cycle(g: &PlaneGraph, inner: &[bool]) -> Option<Vec<VertexId>> {
    let (h, kept, kept_edges) = g.delete_vertices(inner);
    let mut new_edge = vec![usize::MAX; g.edge_count()];
    for (new, &old) in kept_edges.iter().enumerate() {
        new_edge[old] = new;
    }
    let mut face = None;
    for d in g.darts() {
        let (b, a) = (g.origin(d), g.target(d));
        if inner[b] || !inner[a] {
            continue;
        }
        // the deleted dart sits in the angle of the next kept dart clockwise
        let rot = g.rotation(b);
        let at = g.position(d);
        let next = (1..rot.len())
            .map(|i| rot[(at + i) % rot.len()])
            .find(|x| new_edge[x.edge()] != usize::MAX)?;
        let f = h.face_of(Dart::new(new_edge[next.edge()], next.end()));
        if *face.get_or_insert(f) != f {
            return None;
        }
    }
    let boundary = h.face(face?).boundary();
    let cycle: Vec<VertexId> = boundary.iter().map(|&d| kept[h.origin(d)]).collect();
    let distinct: BTreeSet<VertexId> = cycle.iter().copied().collect();
    (cycle.len() >= 3 && distinct.len() == cycle.len()).then_some(cycle)
}

/// Vertices reachable from `start` avoiding `blocked`.
fn reach(adj: &[Vec<VertexId>], start: VertexId, blocked: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] && !blocked[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Nested vertex-disjoint cycles around `v`, innermost first, each
/// separating `v` from every terminal; stops after `limit` cycles.
pub fn nested_cycles(inst: &Instance, v: VertexId, limit: usize) -> Vec<Vec<VertexId>> {
    let g = &inst.graph;
    let adj = simple_adjacency(g);
    let n = g.vertex_count();
    let mut inner = vec![false; n];
    inner[v] = true;
    let mut cycles = Vec::new();
    while cycles.len() < limit {
        let Some(cycle) = enclosing_cycle(g, &inner) else {
            break;
        };
        if cycle.iter().any(|&c| inst.is_terminal(c)) {
            break;
        }
        let mut on_cycle = vec![false; n];
        for &c in &cycle {
            on_cycle[c] = true;
        }
        let side = reach(&adj, v, &on_cycle);
        let separates = (0..n).all(|x| !side[x] || !inst.is_terminal(x));
        let nested = (0..n).all(|x| !inner[x] || side[x]);
        if !separates || !nested {
            break;
        }
        for x in 0..n {
            inner[x] = side[x] || on_cycle[x];
        }
        cycles.push(cycle);
    }
    cycles
}

/// Smallest non-terminal vertex enclosed by at least `depth_bound` nested
/// separating cycles.
pub fn find_irrelevant_vertex(inst: &Instance, depth_bound: usize) -> Option<VertexId> {
    let n = inst.graph.vertex_count();
    // every cycle needs three vertices of its own
    if depth_bound == 0 || depth_bound.saturating_mul(3) >= n {
        return None;
    }
    (0..n)
        .filter(|&v| !inst.is_terminal(v))
        .find(|&v| nested_cycles(inst, v, depth_bound).len() >= depth_bound)
}

/// A reduced instance and how its vertices relate to the input.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: Instance,
    /// Input id of each vertex of the reduced instance.
    pub original_ids: Vec<VertexId>,
    /// Input ids of deleted vertices, in deletion order.
    pub removed: Vec<VertexId>,
    /// Cycle count required per deletion, if reduction ran.
    pub depth_bound: Option<usize>,
}

impl Reduction {
    /// Rewrites a solution of the reduced instance in input ids.
    pub fn lift(&self, sol: &Solution) -> Solution {
        Solution {
            paths: sol
                .paths
                .iter()
                .map(|p| p.iter().map(|&v| self.original_ids[v]).collect())
                .collect(),
        }
    }
}

/// Repeatedly deletes irrelevant vertices until none is found.
pub fn reduce_instance(inst: &Instance, mode: ReduceMode) -> Reduction {
    let depth_bound = match mode {
        ReduceMode::Off => None,
        _ if inst.k() == 0 => None,
        ReduceMode::Safe => Some(usize::try_from(safe_bound(inst.k())).unwrap_or(usize::MAX)),
        ReduceMode::Unsafe(n) => Some(n),
    };
    let mut current = inst.clone();
    let mut original_ids: Vec<VertexId> = (0..inst.graph.vertex_count()).collect();
    let mut removed = Vec::new();
    if let Some(bound) = depth_bound {
        while let Some(v) = find_irrelevant_vertex(&current, bound) {
            let mut mask = vec![false; current.graph.vertex_count()];
            mask[v] = true;
            let (g, kept, _) = current.graph.delete_vertices(&mask);
            let mut new_id = vec![usize::MAX; mask.len()];
            for (new, &old) in kept.iter().enumerate() {
                new_id[old] = new;
            }
            let pairs = current
                .pairs()
                .iter()
                .map(|&(s, t)| (new_id[s], new_id[t]))
                .collect();
            current =
                Instance::new(g, pairs).expect("deleting a non-terminal keeps the instance valid");
            removed.push(original_ids[v]);
            original_ids = kept.iter().map(|&old| original_ids[old]).collect();
        }
    }
    Reduction {
        instance: current,
        original_ids,
        removed,
        depth_bound,
    }
}
