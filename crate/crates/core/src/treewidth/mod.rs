//! Tree decompositions: elimination heuristics, an exact solver for small
//! graphs, validation, nice normalization and PACE `.td` output.

mod nice;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::simple_adjacency;
use crate::plane_graph::{PlaneGraph, VertexId};

pub use nice::{make_nice, NiceKind, NiceNode, NiceTreeDecomposition};

/// Vertex cap for [`Strategy::ExactSmall`].
pub const EXACT_VERTEX_CAP: usize = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreewidthError {
    #[error("exact treewidth is limited to {cap} vertices, graph has {vertices}")]
    SizeLimitExceeded { vertices: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    MinFill,
    MinDegree,
    ExactSmall,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min_fill" | "min-fill" => Ok(Strategy::MinFill),
            "min_degree" | "min-degree" => Ok(Strategy::MinDegree),
            "exact_small" | "exact-small" | "exact" => Ok(Strategy::ExactSmall),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// Rooted tree of bags. Bags are sorted; `parent` is `None` only at the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<VertexId>>,
    pub parent: Vec<Option<usize>>,
}

impl TreeDecomposition {
    /// A single bag holding every vertex.
    pub fn trivial(n: usize) -> TreeDecomposition {
        TreeDecomposition {
            bags: vec![(0..n).collect()],
            parent: vec![None],
        }
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one; an all-empty decomposition has width 0.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(Option::is_none)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(t);
            }
        }
        ch
    }

    /// Checks the three decomposition axioms against `g`.
    pub fn validate(&self, g: &PlaneGraph) -> bool {
        self.check(&simple_adjacency(g)).is_ok()
    }

    /// Like [`validate`](Self::validate) but names the first failed axiom.
    pub fn check(&self, adj: &[Vec<VertexId>]) -> Result<(), String> {
        let n = adj.len();
        let nodes = self.bags.len();
        if nodes == 0 || self.parent.len() != nodes {
            return Err("no nodes or parent table size mismatch".into());
        }
        let roots = self.parent.iter().filter(|p| p.is_none()).count();
        if roots != 1 {
            return Err(format!("expected one root, found {roots}"));
        }
        // acyclic: every node reaches the root within `nodes` steps
        for t in 0..nodes {
            let mut cur = t;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                if p >= nodes || steps > nodes {
                    return Err(format!("node {t} does not reach the root"));
                }
                cur = p;
                steps += 1;
            }
        }
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Err(format!("bag {t} holds unknown vertex {v}"));
                }
                holders[v].push(t);
            }
        }
        if let Some(v) = holders.iter().position(Vec::is_empty) {
            return Err(format!("vertex {v} is in no bag"));
        }
        let sets: Vec<BTreeSet<VertexId>> = self
            .bags
            .iter()
            .map(|b| b.iter().copied().collect())
            .collect();
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                if u < v && !holders[u].iter().any(|&t| sets[t].contains(&v)) {
                    return Err(format!("edge {u}-{v} is in no bag"));
                }
            }
        }
        // connectivity: exactly one holder of v has a parent not holding v
        for (v, hs) in holders.iter().enumerate() {
            let tops = hs
                .iter()
                .filter(|&&t| self.parent[t].is_none_or(|p| !sets[p].contains(&v)))
                .count();
            if tops != 1 {
                return Err(format!("bags containing vertex {v} are not connected"));
            }
        }
        Ok(())
    }

    /// PACE `.td` text: header, 1-indexed bags, then tree edges.
    pub fn to_pace(&self, vertex_count: usize) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "s td {} {} {}",
            self.bags.len(),
            self.width() + 1,
            vertex_count
        )
        .unwrap();
        for (t, bag) in self.bags.iter().enumerate() {
            write!(out, "b {}", t + 1).unwrap();
            for v in bag {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                writeln!(out, "{} {}", p + 1, t + 1).unwrap();
            }
        }
        out
    }
}

pub fn decompose(g: &PlaneGraph, strategy: Strategy) -> Result<TreeDecomposition, TreewidthError> {
    decompose_adjacency(&simple_adjacency(g), strategy)
}

/// Decomposes the simple graph given by symmetric adjacency lists.
pub fn decompose_adjacency(
    adj: &[Vec<VertexId>],
    strategy: Strategy,
) -> Result<TreeDecomposition, TreewidthError> {
    let order = match strategy {
        Strategy::MinFill => greedy_order(adj, fill_in),
        Strategy::MinDegree => greedy_order(adj, |nb, _| nb[..].len()),
        Strategy::ExactSmall => exact_order(adj)?,
    };
    Ok(from_elimination_order(adj, &order))
}

fn fill_in(nb: &[VertexId], adj: &[BTreeSet<VertexId>]) -> usize {
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Repeatedly eliminates the vertex minimizing `score`, ties to the smallest id.
fn greedy_order(
    adj: &[Vec<VertexId>],
    score: impl Fn(&[VertexId], &[BTreeSet<VertexId>]) -> usize,
) -> Vec<VertexId> {
    let n = adj.len();
    let mut filled: Vec<BTreeSet<VertexId>> =
        adj.iter().map(|l| l.iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, VertexId)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<VertexId> = filled[v].iter().copied().collect();
            let s = score(&nb, &filled);
            if best.is_none_or(|(bs, _)| s < bs) {
                best = Some((s, v));
                if s == 0 {
                    break;
                }
            }
        }
        let (_, v) = best.expect("a live vertex remains");
        eliminate(&mut filled, v);
        alive[v] = false;
        order.push(v);
    }
    order
}

fn eliminate(filled: &mut [BTreeSet<VertexId>], v: VertexId) {
    let nb: Vec<VertexId> = std::mem::take(&mut filled[v]).into_iter().collect();
    for &a in &nb {
        filled[a].remove(&v);
        for &b in &nb {
            if a != b {
                filled[a].insert(b);
            }
        }
    }
}

/// Optimal elimination order by dynamic programming over vertex subsets:
/// `tw(S) = min over v in S of max(tw(S - v), |Q(S - v, v)|)` where `Q(S, v)`
/// are the vertices outside `S + v` reachable from `v` through `S`.
fn exact_order(adj: &[Vec<VertexId>]) -> Result<Vec<VertexId>, TreewidthError> {
    let n = adj.len();
    if n > EXACT_VERTEX_CAP {
        return Err(TreewidthError::SizeLimitExceeded {
            vertices: n,
            cap: EXACT_VERTEX_CAP,
        });
    }
    let masks: Vec<u32> = adj
        .iter()
        .map(|l| l.iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let q = |set: u32, v: usize| -> u32 {
        let mut inside = 1u32 << v;
        let mut stack = vec![v];
        let mut boundary = 0u32;
        while let Some(x) = stack.pop() {
            let nb = masks[x] & !inside;
            boundary |= nb & !set;
            let mut grow = nb & set;
            inside |= grow;
            while grow != 0 {
                let y = grow.trailing_zeros() as usize;
                grow &= grow - 1;
                stack.push(y);
            }
        }
        boundary & !(1 << v)
    };
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut best = vec![u8::MAX; 1 << n];
    let mut last = vec![u8::MAX; 1 << n];
    best[0] = 0;
    for set in 1..=full {
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = set & !(1 << v);
            let cost = best[prev as usize].max(q(prev, v).count_ones() as u8);
            if cost < best[set as usize] {
                best[set as usize] = cost;
                last[set as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let v = last[set as usize] as usize;
        order.push(v);
        set &= !(1 << v);
    }
    order.reverse();
    Ok(order)
}

/// Bag of `v` is `v` plus its later neighbours in the filled graph; its
/// parent is the bag of the earliest-eliminated of those neighbours. Roots of
/// separate components hang under one extra empty bag.
pub fn from_elimination_order(adj: &[Vec<VertexId>], order: &[VertexId]) -> TreeDecomposition {
    let n = adj.len();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Vec::new()],
            parent: vec![None],
        };
    }
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut filled: Vec<BTreeSet<VertexId>> =
        adj.iter().map(|l| l.iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = Vec::with_capacity(n);
    for &v in order {
        let later: Vec<VertexId> = filled[v].iter().copied().collect();
        let mut bag = later.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        parent.push(later.iter().map(|&w| position[w]).min());
        eliminate(&mut filled, v);
    }
    let roots: Vec<usize> = (0..n).filter(|&t| parent[t].is_none()).collect();
    if roots.len() > 1 {
        let top = bags.len();
        bags.push(Vec::new());
        parent.push(None);
        for r in roots {
            parent[r] = Some(top);
        }
    }
    TreeDecomposition { bags, parent }
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use crate::instance::{gen_grid, gen_random_planar};
    use crate::plane_graph::tests::cycle;
    use proptest::prelude::*;

    const ALL: [Strategy; 3] = [Strategy::MinFill, Strategy::MinDegree, Strategy::ExactSmall];

    fn grid(r: usize) -> PlaneGraph {
        gen_grid(r, r, &[]).unwrap().graph
    }

    /// Treewidth by trying every elimination order; only for tiny graphs.
    fn width_by_permutations(adj: &[Vec<VertexId>]) -> usize {
        fn go(order: &mut Vec<usize>, used: &mut [bool], adj: &[Vec<usize>], best: &mut usize) {
            if order.len() == adj.len() {
                *best = (*best).min(from_elimination_order(adj, order).width());
                return;
            }
            for v in 0..adj.len() {
                if !used[v] {
                    used[v] = true;
                    order.push(v);
                    go(order, used, adj, best);
                    order.pop();
                    used[v] = false;
                }
            }
        }
        let mut best = usize::MAX;
        go(&mut Vec::new(), &mut vec![false; adj.len()], adj, &mut best);
        best
    }

    #[test]
    fn tree_has_width_one() {
        let star = PlaneGraph::build(5, &[(0, 1), (0, 2), (0, 3), (3, 4)], None, None).unwrap();
        for s in ALL {
            let td = decompose(&star, s).unwrap();
            assert!(td.validate(&star));
            assert_eq!(td.width(), 1, "{s:?}");
        }
    }

    #[test]
    fn cycle_has_width_two() {
        let c = cycle(4);
        for s in ALL {
            let td = decompose(&c, s).unwrap();
            assert!(td.validate(&c));
            assert_eq!(td.width(), 2);
        }
    }

    #[test]
    fn grid_widths() {
        for r in 2..=6 {
            let g = grid(r);
            for s in [Strategy::MinFill, Strategy::MinDegree] {
                let td = decompose(&g, s).unwrap();
                assert!(td.validate(&g));
                assert!(
                    td.width() >= r && td.width() <= 2 * r,
                    "{r} {s:?} {}",
                    td.width()
                );
            }
        }
        for r in 2..=3 {
            let g = grid(r);
            let td = decompose(&g, Strategy::ExactSmall).unwrap();
            assert_eq!(td.width(), r);
        }
    }

    #[test]
    fn exact_matches_permutation_oracle() {
        for seed in 0..12 {
            let inst = gen_random_planar(7, 0, seed).unwrap();
            let adj = simple_adjacency(&inst.graph);
            let td = decompose(&inst.graph, Strategy::ExactSmall).unwrap();
            assert_eq!(td.width(), width_by_permutations(&adj), "seed {seed}");
        }
        let k4 = PlaneGraph::build(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            None,
            None,
        )
        .unwrap();
        assert_eq!(decompose(&k4, Strategy::ExactSmall).unwrap().width(), 3);
    }

    #[test]
    fn exact_cap() {
        assert_eq!(
            decompose(&grid(4), Strategy::ExactSmall),
            Err(TreewidthError::SizeLimitExceeded {
                vertices: 16,
                cap: EXACT_VERTEX_CAP
            })
        );
    }

    #[test]
    fn validation_failures() {
        let c = cycle(4);
        assert!(TreeDecomposition::trivial(4).validate(&c));
        assert_eq!(TreeDecomposition::trivial(4).width(), 3);
        let missing_edge = TreeDecomposition {
            bags: vec![vec![0, 1, 2], vec![0, 2]],
            parent: vec![None, Some(0)],
        };
        assert!(!missing_edge.validate(&c));
        let split = TreeDecomposition {
            bags: vec![vec![0, 1, 3], vec![1, 2, 3], vec![0, 2]],
            parent: vec![None, Some(0), Some(1)],
        };
        assert!(!split.validate(&c));
        let two_roots = TreeDecomposition {
            bags: vec![vec![0, 1, 2, 3], vec![0]],
            parent: vec![None, None],
        };
        assert!(!two_roots.validate(&c));
    }

    #[test]
    fn disconnected_graph_gets_empty_root() {
        let g = PlaneGraph::build(5, &[(0, 1), (1, 2), (3, 4)], None, None).unwrap();
        let td = decompose(&g, Strategy::MinFill).unwrap();
        assert!(td.validate(&g));
        assert!(td.bags[td.root().unwrap()].is_empty());
        let empty = PlaneGraph::build(0, &[], None, None).unwrap();
        assert!(decompose(&empty, Strategy::MinDegree)
            .unwrap()
            .validate(&empty));
    }

    #[test]
    fn pace_output() {
        let c = cycle(4);
        let td = TreeDecomposition::trivial(4);
        assert_eq!(td.to_pace(4), "s td 1 4 4\nb 1 1 2 3 4\n");
        let td = decompose(&c, Strategy::MinDegree).unwrap();
        let text = td.to_pace(4);
        assert!(text.starts_with(&format!("s td {} 3 4\n", td.node_count())));
        assert_eq!(text.lines().count(), 1 + 2 * td.node_count() - 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn heuristics_valid_and_exact_is_lower(n in 2usize..13, seed in any::<u64>()) {
            let inst = gen_random_planar(n, 0, seed).unwrap();
            let g = &inst.graph;
            let exact = decompose(g, Strategy::ExactSmall).unwrap();
            prop_assert!(exact.validate(g));
            for s in [Strategy::MinFill, Strategy::MinDegree] {
                let td = decompose(g, s).unwrap();
                prop_assert!(td.validate(g));
                prop_assert!(exact.width() <= td.width());
            }
        }
    }
}
