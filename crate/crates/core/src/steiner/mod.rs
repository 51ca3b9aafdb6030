//! Steiner trees over the terminals in a radial completion: construction,
//! maximal degree-2 paths, detour removal, separators between subtrees and
//! weak linkages.

mod format;
mod linkage;
mod separator;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{EdgeId, PlaneGraph, VertexId};

pub use format::{parse_linkage, parse_tree, serialize_linkage, serialize_tree, SteinerParseError};
pub use linkage::{
    interleaving_chords, is_pushed_onto, linkage_violation, solution_walks, validate_weak_linkage,
    LinkageViolation, WeakLinkage,
};
pub use separator::{separator, PathEnd, Separator, DEFAULT_D_FAR, DEFAULT_D_NEAR};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinerError {
    #[error("terminal {0} cannot be reached from the other terminals")]
    Disconnected(VertexId),
    #[error("path of length {len} is too short for cut distances {d_near} < {d_far}")]
    PathTooShort {
        len: usize,
        d_near: usize,
        d_far: usize,
    },
    #[error("path is not a maximal degree-2 path of the tree")]
    NotATreePath,
}

/// Tree given by its edge set in the host graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerTree {
    pub edges: BTreeSet<EdgeId>,
}

/// Adjacency of a tree: vertex -> (neighbour, edge) sorted by edge id.
type TreeAdj = BTreeMap<VertexId, Vec<(VertexId, EdgeId)>>;

impl SteinerTree {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn adjacency(&self, g: &PlaneGraph) -> TreeAdj {
        let mut adj = TreeAdj::new();
        for &e in &self.edges {
            let [a, b] = g.endpoints(e);
            adj.entry(a).or_default().push((b, e));
            adj.entry(b).or_default().push((a, e));
        }
        adj
    }

    pub fn vertices(&self, g: &PlaneGraph) -> BTreeSet<VertexId> {
        self.edges.iter().flat_map(|&e| g.endpoints(e)).collect()
    }

    pub fn degree(&self, g: &PlaneGraph, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|&&e| g.endpoints(e).contains(&v))
            .count()
    }

    pub fn leaves(&self, g: &PlaneGraph) -> BTreeSet<VertexId> {
        self.adjacency(g)
            .into_iter()
            .filter(|(_, l)| l.len() == 1)
            .map(|(v, _)| v)
            .collect()
    }

    /// Vertices of tree degree at least 3.
    pub fn branch_vertices(&self, g: &PlaneGraph) -> BTreeSet<VertexId> {
        self.adjacency(g)
            .into_iter()
            .filter(|(_, l)| l.len() >= 3)
            .map(|(v, _)| v)
            .collect()
    }

    /// Checks that the edges form a tree containing every terminal whose
    /// leaves are all terminals.
    pub fn check(&self, g: &PlaneGraph, terminals: &[VertexId]) -> Result<(), String> {
        let want: BTreeSet<VertexId> = terminals.iter().copied().collect();
        if self.edges.is_empty() {
            return if want.len() <= 1 {
                Ok(())
            } else {
                Err("empty tree for several terminals".into())
            };
        }
        if let Some(&e) = self.edges.iter().find(|&&e| e >= g.edge_count()) {
            return Err(format!("edge {e} is not in the graph"));
        }
        let adj = self.adjacency(g);
        if adj.len() != self.edges.len() + 1 {
            return Err("edge set is not a tree".into());
        }
        let start = *adj.keys().next().expect("nonempty tree");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(w, _) in &adj[&x] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != adj.len() {
            return Err("edge set is disconnected".into());
        }
        if let Some(t) = want.iter().find(|t| !adj.contains_key(t)) {
            return Err(format!("terminal {t} is not on the tree"));
        }
        let leaves = self.leaves(g);
        if !leaves.is_subset(&want) {
            return Err(format!(
                "leaves {leaves:?} include non-terminals (terminals {want:?})"
            ));
        }
        Ok(())
    }
}

/// Neighbours of every vertex as (neighbour, edge) sorted by edge id, loops skipped.
fn host_adjacency(g: &PlaneGraph) -> Vec<Vec<(VertexId, EdgeId)>> {
    (0..g.vertex_count())
        .map(|v| {
            let mut out: Vec<(VertexId, EdgeId)> = g
                .rotation(v)
                .iter()
                .map(|&d| (g.target(d), d.edge()))
                .filter(|&(w, _)| w != v)
                .collect();
            out.sort_by_key(|&(_, e)| e);
            out
        })
        .collect()
}

/// Grows a tree from the smallest terminal, each round attaching the nearest
/// unattached terminal by a shortest path with only non-terminal interior
/// vertices. Ties go to smaller vertex ids; non-terminal leaves are trimmed
/// at the end.
///
/// With three or more terminals, interior vertices come from the first
/// component of non-terminals adjacent to every terminal and paths leave the
/// tree at non-terminals, which keeps every terminal a leaf. When no such
/// component exists, paths may leave from any tree vertex and some terminals
/// end up inside the tree.
pub fn initial_steiner_tree(
    gr: &PlaneGraph,
    terminals: &[VertexId],
) -> Result<SteinerTree, SteinerError> {
    let n = gr.vertex_count();
    let adj = host_adjacency(gr);
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let mut remaining: BTreeSet<VertexId> = terminals.iter().copied().collect();
    let Some(root) = remaining.pop_first() else {
        return Ok(SteinerTree::default());
    };
    let mut in_tree = vec![false; n];
    in_tree[root] = true;
    let mut tree = SteinerTree::default();
    let hub = if remaining.len() >= 2 {
        hub_component(&adj, &is_terminal, terminals)
    } else {
        None
    };
    let leaves_only = hub.is_some();
    let interior_ok = |v: VertexId| !is_terminal[v] && hub.as_ref().is_none_or(|h| h[v]);

    while !remaining.is_empty() {
        let single = tree.edges.is_empty();
        let sources: Vec<VertexId> = if single {
            vec![root]
        } else {
            (0..n)
                .filter(|&v| in_tree[v] && (!leaves_only || !is_terminal[v]))
                .collect()
        };
        let mut prev: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &s in &sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        let mut reached: Option<VertexId> = None;
        while let Some(x) = queue.pop_front() {
            if reached.is_some_and(|r| dist[x] >= dist[r]) {
                break;
            }
            for &(w, e) in &adj[x] {
                if dist[w] != usize::MAX || in_tree[w] {
                    continue;
                }
                if is_terminal[w] {
                    // with more terminals to come, a bare terminal-terminal edge
                    // would leave nothing to attach them to
                    if single && leaves_only && x == root {
                        continue;
                    }
                    dist[w] = dist[x] + 1;
                    prev[w] = Some((x, e));
                    // nearest first, then smallest id at that distance
                    let better = match reached {
                        None => true,
                        Some(r) => dist[w] < dist[r] || (dist[w] == dist[r] && w < r),
                    };
                    if better {
                        reached = Some(w);
                    }
                    continue;
                }
                if !interior_ok(w) {
                    continue;
                }
                dist[w] = dist[x] + 1;
                prev[w] = Some((x, e));
                queue.push_back(w);
            }
        }
        let Some(t) = reached else {
            return Err(SteinerError::Disconnected(
                *remaining.first().expect("nonempty"),
            ));
        };
        let mut cur = t;
        while let Some((p, e)) = prev[cur] {
            tree.edges.insert(e);
            in_tree[cur] = true;
            cur = p;
            if dist[cur] == 0 {
                break;
            }
        }
        remaining.remove(&t);
    }
    trim_nonterminal_leaves(&mut tree, gr, &is_terminal);
    Ok(tree)
}

/// Membership mask of the first component of non-terminal vertices that is
/// adjacent to every terminal.
fn hub_component(
    adj: &[Vec<(VertexId, EdgeId)>],
    is_terminal: &[bool],
    terminals: &[VertexId],
) -> Option<Vec<bool>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    for start in (0..n).filter(|&v| !is_terminal[v]) {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut i = 0;
        while i < members.len() {
            for &(w, _) in &adj[members[i]] {
                if !seen[w] && !is_terminal[w] {
                    seen[w] = true;
                    members.push(w);
                }
            }
            i += 1;
        }
        let mut mask = vec![false; n];
        members.iter().for_each(|&v| mask[v] = true);
        if terminals
            .iter()
            .all(|&t| adj[t].iter().any(|&(w, _)| mask[w]))
        {
            return Some(mask);
        }
    }
    None
}

fn trim_nonterminal_leaves(tree: &mut SteinerTree, g: &PlaneGraph, is_terminal: &[bool]) {
    loop {
        let adj = tree.adjacency(g);
        let doomed: Vec<EdgeId> = adj
            .iter()
            .filter(|(v, l)| l.len() == 1 && !is_terminal[**v])
            .map(|(_, l)| l[0].1)
            .collect();
        if doomed.is_empty() {
            return;
        }
        for e in doomed {
            tree.edges.remove(&e);
        }
    }
}

/// A maximal path of the tree whose interior vertices have tree degree 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTwoPath {
    /// From one endpoint to the other; `vertices.len() == edges.len() + 1`.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl DegreeTwoPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn ends(&self) -> (VertexId, VertexId) {
        (
            self.vertices[0],
            *self.vertices.last().expect("paths have vertices"),
        )
    }
}

/// All maximal degree-2 paths, each once, oriented from the endpoint whose
/// first edge id is smaller; sorted by that edge.
pub fn degree2_paths(tree: &SteinerTree, g: &PlaneGraph) -> Vec<DegreeTwoPath> {
    let adj = tree.adjacency(g);
    let mut out = Vec::new();
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut starts: Vec<(EdgeId, VertexId)> = adj
        .iter()
        .filter(|(_, l)| l.len() != 2)
        .flat_map(|(&v, l)| l.iter().map(move |&(_, e)| (e, v)))
        .collect();
    starts.sort_unstable();
    for (e0, v) in starts {
        if used.contains(&e0) {
            continue;
        }
        let mut vertices = vec![v];
        let mut edges = vec![];
        let mut cur = v;
        let mut e = e0;
        loop {
            used.insert(e);
            edges.push(e);
            let [a, b] = g.endpoints(e);
            cur = if a == cur { b } else { a };
            vertices.push(cur);
            let list = &adj[&cur];
            if list.len() != 2 {
                break;
            }
            e = if list[0].1 == e { list[1].1 } else { list[0].1 };
        }
        out.push(DegreeTwoPath { vertices, edges });
    }
    out
}

/// A maximal degree-2 path together with a strictly shorter path joining
/// the two components left when its interior is removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detour {
    pub u: VertexId,
    pub v: VertexId,
    pub path: DegreeTwoPath,
    pub shortcut_vertices: Vec<VertexId>,
    pub shortcut_edges: Vec<EdgeId>,
}

/// The tree component containing `start` after deleting `removed_edges`.
fn tree_component(
    adj: &TreeAdj,
    start: VertexId,
    removed_edges: &BTreeSet<EdgeId>,
) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &(w, e) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if !removed_edges.contains(&e) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// Vertices of a side component where a replacement path may attach
/// without turning a terminal into an inner tree vertex.
fn attachable(side: &BTreeSet<VertexId>, is_terminal: &[bool]) -> Vec<VertexId> {
    if side.len() == 1 {
        return side.iter().copied().collect();
    }
    side.iter().copied().filter(|&x| !is_terminal[x]).collect()
}

/// Shortest path from `from` to `to` avoiding `blocked` interior vertices,
/// sources tried in id order and edges in id order.
fn shortest_between(
    adj: &[Vec<(VertexId, EdgeId)>],
    from: &[VertexId],
    to: &BTreeSet<VertexId>,
    blocked: &[bool],
) -> Option<(Vec<VertexId>, Vec<EdgeId>)> {
    let n = adj.len();
    let mut prev: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in from {
        seen[s] = true;
        queue.push_back(s);
    }
    let mut hit = None;
    'bfs: while let Some(x) = queue.pop_front() {
        for &(w, e) in &adj[x] {
            if seen[w] {
                continue;
            }
            if to.contains(&w) {
                prev[w] = Some((x, e));
                hit = Some(w);
                break 'bfs;
            }
            if blocked[w] {
                continue;
            }
            seen[w] = true;
            prev[w] = Some((x, e));
            queue.push_back(w);
        }
    }
    let mut cur = hit?;
    let mut vertices = vec![cur];
    let mut edges = vec![];
    while let Some((p, e)) = prev[cur] {
        edges.push(e);
        vertices.push(p);
        cur = p;
    }
    vertices.reverse();
    edges.reverse();
    Some((vertices, edges))
}

/// First maximal degree-2 path (in [`degree2_paths`] order) that admits a
/// strictly shorter replacement, with the shortest such replacement.
pub fn find_detour(tree: &SteinerTree, gr: &PlaneGraph, terminals: &[VertexId]) -> Option<Detour> {
    let n = gr.vertex_count();
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let host = host_adjacency(gr);
    let adj = tree.adjacency(gr);
    for path in degree2_paths(tree, gr) {
        // a terminal inside the path would be cut off by any replacement
        let inner = &path.vertices[1..path.vertices.len() - 1];
        if path.len() < 2 || inner.iter().any(|&x| is_terminal[x]) {
            continue;
        }
        let (u, v) = path.ends();
        let cut: BTreeSet<EdgeId> = path.edges.iter().copied().collect();
        let side_u = tree_component(&adj, u, &cut);
        let side_v = tree_component(&adj, v, &cut);
        let mut blocked = vec![false; n];
        for &x in side_u.iter().chain(&side_v).chain(terminals) {
            blocked[x] = true;
        }
        let from = attachable(&side_u, &is_terminal);
        let to: BTreeSet<VertexId> = attachable(&side_v, &is_terminal).into_iter().collect();
        if let Some((vertices, edges)) = shortest_between(&host, &from, &to, &blocked) {
            if edges.len() < path.len() {
                return Some(Detour {
                    u,
                    v,
                    path,
                    shortcut_vertices: vertices,
                    shortcut_edges: edges,
                });
            }
        }
    }
    None
}

/// Replaces detours until none is left. Each step removes at least one
/// edge, so the number of steps is below the initial tree size.
pub fn remove_detours(
    tree: &SteinerTree,
    gr: &PlaneGraph,
    terminals: &[VertexId],
) -> (SteinerTree, usize) {
    let mut tree = tree.clone();
    let mut steps = 0;
    while let Some(d) = find_detour(&tree, gr, terminals) {
        for e in &d.path.edges {
            tree.edges.remove(e);
        }
        tree.edges.extend(d.shortcut_edges.iter().copied());
        steps += 1;
    }
    (tree, steps)
}
